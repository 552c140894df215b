#include "rtp.h"

/**
 * @brief Decode an RTP header from a memory buffer. Fields are stored in
 * host byte order.
 * @param hdr Header to fill in
 * @param mb Buffer positioned at the header
 */
int rtp_hdr_decode(struct rtp_header *hdr, struct mbuf *mb)
{
	uint8_t buf[2];

	if (mbuf_get_left(mb) < RTP_HEADER_SIZE)
		return EBADMSG;

	buf[0] = mbuf_read_u8(mb);
	buf[1] = mbuf_read_u8(mb);
	hdr->ver = (buf[0] >> 6) & 0x03;
	hdr->pad = (buf[0] >> 5) & 0x01;
	hdr->ext = (buf[0] >> 4) & 0x01;
	hdr->cc  = (buf[0] >> 0) & 0x0f;
	hdr->m   = (buf[1] >> 7) & 0x01;
	hdr->pt  = (buf[1] >> 0) & 0x7f;
	hdr->seq = ntohs(mbuf_read_u16(mb));
	hdr->ts  = ntohl(mbuf_read_u32(mb));
	return 0;
}

/*
 * Description:
 * Encode an RTP header into a memory buffer. The buffer grows as needed.
 */
int rtp_hdr_encode(struct mbuf *mb, const struct rtp_header *hdr)
{
	uint8_t buf[2];
	int err = 0;

	buf[0]  = (hdr->ver & 0x02) << 6;
	buf[0] |= (hdr->pad & 0x01) << 5;
	buf[0] |= (hdr->ext & 0x01) << 4;
	buf[0] |= (hdr->cc  & 0x0f) << 0;
	buf[1]  = (hdr->m   & 0x01) << 7;
	buf[1] |= (hdr->pt  & 0x7f) << 0;
	err |= mbuf_write_mem(mb, buf, sizeof(buf));
	err |= mbuf_write_u16(mb, htons(hdr->seq));
	err |= mbuf_write_u32(mb, htonl(hdr->ts));
	return err;
}

// Send an RTCP BYE packet to every member of the session.
int rtcp_send_bye(struct rtp_sock *rs, const char *reason)
{
	if (!rs)
		return EINVAL;
	return rtcp_send(rs, RTCP_BYE, 1, &rs->enc.ssrc, reason);
}

/**
 * Initialize the packet pool used by the encoder.
 */
int init(struct mbuf_pool *pool)
{
	pool->count = 0;
	pool->size = 1024;
	return 0;
}
