#include <stdlib.h>
#include <string.h>

#include "kv.h"

Arena *arena_new(size_t cap) {
  Arena *a = malloc(sizeof(Arena));
  if (a == NULL) return NULL;
  a->base = malloc(cap);
  a->cap = cap;
  a->used = 0;
  return a;
}

void *arena_alloc(Arena *a, size_t n) {
  size_t aligned = (n + 7) & ~(size_t)7;
  if (a->used + aligned > a->cap) {
    return NULL;
  }
  void *p = a->base + a->used;
  a->used += aligned;
  return p;
}

char *arena_strdup(Arena *a, const char *s) {
  size_t n = strlen(s);
  char *copy = arena_alloc(a, n + 1);
  if (copy == NULL) return NULL;
  memcpy(copy, s, n);
  copy[n] = '\0';
  return copy;
}

void arena_free(Arena *a) {
  free(a->base);
  free(a);
}

int buf_copy(char *dst, size_t cap, const char *src) {
  size_t i = 0;
  while (src[i] != '\0' && i + 1 < cap) {
    dst[i] = src[i];
    i++;
  }
  dst[i] = '\0';
  return (int)i;
}

int parse_int(const char *s, int *out) {
  int sign = 1;
  int v = 0;
  if (*s == '-') {
    sign = -1;
    s++;
  }
  if (*s < '0' || *s > '9') return 0;
  while (*s >= '0' && *s <= '9') {
    v = v * 10 + (*s - '0');
    s++;
  }
  *out = v * sign;
  return 1;
}

int ring_push(int *ring, unsigned cap, unsigned *head, int v) {
  unsigned slot = *head % cap;
  ring[slot] = v;
  *head = (*head + 1) % cap;
  return (int)slot;
}

int checksum(const int *vals, size_t n) {
  int acc = 17;
  for (size_t i = 0; i < n; ++i) {
    acc ^= vals[i] << (i & 3);
    acc |= 1;
  }
  return acc;
}

unsigned bitmap_set(unsigned *words, unsigned bit) {
  words[bit >> 5] |= 1u << (bit & 31);
  return words[bit >> 5];
}

int bitmap_test(const unsigned *words, unsigned bit) {
  return (words[bit >> 5] >> (bit & 31)) & 1u;
}
