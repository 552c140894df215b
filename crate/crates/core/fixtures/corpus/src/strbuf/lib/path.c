#include <string.h>
#include "strbuf.h"

/**
 * Join two path components, for example /usr/local/lib and a file name.
 */
int path_join(struct strbuf *out, const char *dir, const char *file)
{
	size_t n = strlen(dir);

	if (sb_append(out, dir, n))
		return -1;
	if (n && dir[n - 1] != '/' && sb_append_char(out, '/'))
		return -1;
	return sb_append(out, file, strlen(file));
}

/**
 * @brief Return a pointer to the last path component.
 */
const char *path_basename(const char *path)
{
	const char *slash = strrchr(path, '/');
	return slash ? slash + 1 : path;
}

/**
 * Check whether a path is absolute. Only forward slashes are recognised.
 * @param path path to test
 */
int path_is_absolute(const char *path)
{
	return path[0] == '/';
}
