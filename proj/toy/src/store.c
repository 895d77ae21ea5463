#include <string.h>

#include "kv.h"

unsigned hash_key(const char *s) {
  unsigned h = 2166136261u;
  while (*s) {
    h ^= (unsigned char)*s++;
    h *= 16777619u;
  }
  return h;
}

Store *store_new(Arena *a, unsigned nbuckets) {
  Store *st = arena_alloc(a, sizeof(Store));
  if (st == NULL) return NULL;
  st->arena = a;
  st->nbuckets = nbuckets;
  st->count = 0;
  st->buckets = arena_alloc(a, nbuckets * sizeof(Entry *));
  memset(st->buckets, 0, nbuckets * sizeof(Entry *));
  return st;
}

static Entry *find_entry(const Store *st, const char *key) {
  unsigned idx = hash_key(key) % st->nbuckets;
  Entry *e = st->buckets[idx];
  while (e != NULL) {
    if (strcmp(e->key, key) == 0) return e;
    e = e->next;
  }
  return NULL;
}

int store_put(Store *st, const char *key, int value) {
  Entry *e = find_entry(st, key);
  if (e != NULL) {
    e->value = value;
    return 0;
  }
  unsigned idx = hash_key(key) % st->nbuckets;
  e = arena_alloc(st->arena, sizeof(Entry));
  e->key = arena_strdup(st->arena, key);
  e->value = value;
  e->next = st->buckets[idx];
  st->buckets[idx] = e;
  st->count++;
  return 1;
}

int store_get(const Store *st, const char *key, int *out) {
  Entry *e = find_entry(st, key);
  if (e == NULL || out == NULL) return 0;
  *out = e->value;
  return 1;
}

int store_sum(const Store *st) {
  int total = 0;
  for (unsigned b = 0; b < st->nbuckets; ++b) {
    for (Entry *e = st->buckets[b]; e != NULL; e = e->next) {
      total += e->value;
    }
  }
  return total;
}
