#include <stdlib.h>
#include <string.h>
#include "strbuf.h"

/**
 * Create an empty string buffer with room for at least `hint` bytes.
 */
int sb_init(struct strbuf *sb, size_t hint)
{
	sb->len = 0;
	sb->cap = hint ? hint : 16;
	sb->buf = malloc(sb->cap);
	if (!sb->buf)
		return -1;
	sb->buf[0] = '\0';
	return 0;
}

/** Release the memory owned by a string buffer. */
void sb_free(struct strbuf *sb)
{
	free(sb->buf);
	sb->buf = NULL;
	sb->len = sb->cap = 0;
}

/*
 * Make sure the buffer can hold `extra` more bytes plus the terminator.
 * Returns 0 on success and -1 when out of memory.
 */
static int sb_grow(struct strbuf *sb, size_t extra)
{
	size_t want = sb->len + extra + 1;
	char *p;

	if (want <= sb->cap)
		return 0;
	while (sb->cap < want)
		sb->cap *= 2;
	p = realloc(sb->buf, sb->cap);
	if (!p)
		return -1;
	sb->buf = p;
	return 0;
}

/**
 * Append a byte string to the end of the buffer.
 *
 * @param sb buffer
 * @param s bytes to copy
 * @param n number of bytes
 */
int sb_append(struct strbuf *sb, const char *s, size_t n)
{
	if (sb_grow(sb, n))
		return -1;
	memcpy(sb->buf + sb->len, s, n);
	sb->len += n;
	sb->buf[sb->len] = '\0';
	return 0;
}

/**
 * Append a single character to the end of the buffer.
 *
 * @param sb buffer
 * @param c character
 */
int sb_append_char(struct strbuf *sb, char c)
{
	if (sb_grow(sb, 1))
		return -1;
	sb->buf[sb->len] = c;
	sb->len += 1;
	sb->buf[sb->len] = '\0';
	return 0;
}

// Length.
size_t sb_len(const struct strbuf *sb)
{
	return sb->len;
}

/* Remove trailing whitespace from the buffer, e.g. a final newline. */
void sb_rtrim(struct strbuf *sb)
{
	while (sb->len > 0 && isspace((unsigned char)sb->buf[sb->len - 1]))
		sb->len--;
	sb->buf[sb->len] = '\0';
}

/**
 * Find the first occurrence of a character and return its offset, or -1
 * when the character does not occur.
 */
long sb_find(const struct strbuf *sb, char c)
{
	const char *p = memchr(sb->buf, c, sb->len);
	return p ? (long)(p - sb->buf) : -1;
}

void sb_reset(struct strbuf *sb)
{
	sb->len = 0;
	sb->buf[0] = '\0';
}
