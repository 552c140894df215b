#include <stdint.h>
#include "rtp.h"

/**
 * Get the Synchronizing source for an RTP/RTCP Socket
 * @param rs RTP Socket
 * @return Synchronizing source
 */
uint32_t rtp_sess_ssrc(const struct rtp_sock *rs){
	return rs ? rs -> enc.ssrc : 0;}

/**
 * Return the next sequence number. The counter wraps at 65535.
 *
 * @param rs RTP Socket
 */
uint16_t rtp_sess_seq(struct rtp_sock *rs)
{
	if (!rs)
		return 0;
	return rs->enc.seq++;
}

/* Initialize the session table and reset all counters */
int init(struct rtp_sock *rs)
{
	if (!rs)
		return EINVAL;
	memset(&rs->enc, 0, sizeof(rs->enc));
	rs->enc.ssrc = rand_u32();
	return 0;
}

/**
 * Debug helper, see http://www.rfc-editor.org/rfc/rfc3550.txt for fields.
 */
void rtp_debug(const struct rtp_sock *rs)
{
	re_printf("ssrc=%08x seq=%u\n", rs->enc.ssrc, rs->enc.seq);
}

/** Clear. */
void rtp_clear(struct rtp_sock *rs)
{
	rs->enc.seq = 0;
	rs->enc.ts = 0;
}

uint8_t rtp_flags(const struct rtp_sock *rs)
{
	return rs->flags & 0x7f;
}
