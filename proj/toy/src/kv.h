/* Tiny arena-backed key/value store used as a mutation target. */
#ifndef TOY_KV_H
#define TOY_KV_H

#include <stddef.h>

typedef struct Arena {
  unsigned char *base;
  size_t cap;
  size_t used;
} Arena;

typedef struct Entry {
  char *key;
  int value;
  struct Entry *next;
} Entry;

typedef struct Store {
  Arena *arena;
  Entry **buckets;
  unsigned nbuckets;
  unsigned count;
} Store;

Arena *arena_new(size_t cap);
void *arena_alloc(Arena *a, size_t n);
char *arena_strdup(Arena *a, const char *s);
void arena_free(Arena *a);

unsigned hash_key(const char *s);
Store *store_new(Arena *a, unsigned nbuckets);
int store_put(Store *st, const char *key, int value);
int store_get(const Store *st, const char *key, int *out);
int store_sum(const Store *st);

int buf_copy(char *dst, size_t cap, const char *src);
int parse_int(const char *s, int *out);
int ring_push(int *ring, unsigned cap, unsigned *head, int v);
int checksum(const int *vals, size_t n);
unsigned bitmap_set(unsigned *words, unsigned bit);
int bitmap_test(const unsigned *words, unsigned bit);

#endif
