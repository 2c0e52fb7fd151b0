#ifndef CHEAPBWE_H
#define CHEAPBWE_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum CbweStatus {
  CBWE_STATUS_OK = 0,
  CBWE_STATUS_NULL_POINTER = 1,
  CBWE_STATUS_INVALID_UTF8 = 2,
  CBWE_STATUS_INVALID_CONFIG = 3,
  CBWE_STATUS_IO = 4,
  CBWE_STATUS_PARSE = 5,
  CBWE_STATUS_INVALID_INPUT = 6,
  CBWE_STATUS_NUMERICAL = 7,
  CBWE_STATUS_PANIC = 8,
} CbweStatus;

typedef struct CbweLexicon CbweLexicon;

typedef struct CbweMapping CbweMapping;

typedef struct CbweSpace CbweSpace;

typedef struct CbweTable CbweTable;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or NULL. The pointer
 * stays valid until the next failing call on the same thread.
 */
const char *cbwe_last_error_message(void);

/**
 * # Safety
 * `s` must be NULL or a string returned by this library, freed once.
 */
void cbwe_string_free(char *s);

/**
 * Opens a romanization table: `bundled`, `bundled:<script>` or a file path.
 *
 * # Safety
 * `spec` must be a NUL-terminated string; `out` must be writable.
 */
enum CbweStatus cbwe_table_open(const char *spec, struct CbweTable **out);

/**
 * # Safety
 * `table` must be NULL or a handle from [`cbwe_table_open`], freed once.
 */
void cbwe_table_free(struct CbweTable *table);

/**
 * Romanizes one word. `out_uncovered` may be NULL.
 *
 * # Safety
 * Pointers must be valid; `*out_text` must be released with [`cbwe_string_free`].
 */
enum CbweStatus cbwe_romanize(const struct CbweTable *table,
                              const char *word,
                              char **out_text,
                              size_t *out_uncovered);

/**
 * `1 - lev(a, b) / max(|a|, |b|)` over Unicode scalar values.
 *
 * # Safety
 * `a` and `b` must be NUL-terminated strings; `out` must be writable.
 */
enum CbweStatus cbwe_similarity(const char *a, const char *b, double *out);

/**
 * Loads at most `max_vocab` words from a word2vec text file.
 *
 * # Safety
 * `path` and `lang` must be NUL-terminated strings; `out` must be writable.
 */
enum CbweStatus cbwe_space_load(const char *path,
                                size_t max_vocab,
                                const char *lang,
                                struct CbweSpace **out);

/**
 * Applies the default normalization (unit, center, unit) into a new handle.
 *
 * # Safety
 * `space` must be a live handle; `out` must be writable.
 */
enum CbweStatus cbwe_space_normalize(const struct CbweSpace *space, struct CbweSpace **out);

/**
 * # Safety
 * `space` must be a live handle; `path` a NUL-terminated string.
 */
enum CbweStatus cbwe_space_save(const struct CbweSpace *space, const char *path);

/**
 * Number of words, or 0 for NULL.
 *
 * # Safety
 * `space` must be NULL or a live handle.
 */
size_t cbwe_space_len(const struct CbweSpace *space);

/**
 * Vector dimension, or 0 for NULL.
 *
 * # Safety
 * `space` must be NULL or a live handle.
 */
size_t cbwe_space_dim(const struct CbweSpace *space);

/**
 * # Safety
 * `space` must be NULL or a handle from this library, freed once.
 */
void cbwe_space_free(struct CbweSpace *space);

/**
 * Loads a two-column lexicon file (tab or space separated).
 *
 * # Safety
 * String arguments must be NUL-terminated; `out` must be writable.
 */
enum CbweStatus cbwe_lexicon_load(const char *path,
                                  const char *src_lang,
                                  const char *trg_lang,
                                  struct CbweLexicon **out);

/**
 * Pairs every word spelled identically in both vocabularies.
 *
 * # Safety
 * `src` and `trg` must be live handles; `out` must be writable.
 */
enum CbweStatus cbwe_lexicon_identical(const struct CbweSpace *src,
                                       const struct CbweSpace *trg,
                                       struct CbweLexicon **out);

/**
 * Order-preserving union of two lexicons over the same language pair.
 *
 * # Safety
 * `a` and `b` must be live handles; `out` must be writable.
 */
enum CbweStatus cbwe_lexicon_merge(const struct CbweLexicon *a,
                                   const struct CbweLexicon *b,
                                   struct CbweLexicon **out);

/**
 * # Safety
 * `lexicon` must be a live handle; `path` a NUL-terminated string.
 */
enum CbweStatus cbwe_lexicon_save(const struct CbweLexicon *lexicon, const char *path);

/**
 * Number of pairs, or 0 for NULL.
 *
 * # Safety
 * `lexicon` must be NULL or a live handle.
 */
size_t cbwe_lexicon_len(const struct CbweLexicon *lexicon);

/**
 * # Safety
 * `lexicon` must be NULL or a handle from this library, freed once.
 */
void cbwe_lexicon_free(struct CbweLexicon *lexicon);

/**
 * Self-learning alignment with default settings and the given seed.
 *
 * # Safety
 * Handles must be live; `out` must be writable.
 */
enum CbweStatus cbwe_mapping_learn(const struct CbweSpace *src,
                                   const struct CbweSpace *trg,
                                   const struct CbweLexicon *seed_lexicon,
                                   uint64_t seed,
                                   struct CbweMapping **out);

/**
 * Maps both spaces into the shared space as new handles.
 *
 * # Safety
 * Handles must be live; both out-pointers must be writable.
 */
enum CbweStatus cbwe_mapping_apply(const struct CbweMapping *mapping,
                                   const struct CbweSpace *src,
                                   const struct CbweSpace *trg,
                                   struct CbweSpace **out_src,
                                   struct CbweSpace **out_trg);

/**
 * Iterations run, or 0 for NULL.
 *
 * # Safety
 * `mapping` must be NULL or a live handle.
 */
size_t cbwe_mapping_iterations(const struct CbweMapping *mapping);

/**
 * Objective of the best iteration, or NaN for NULL.
 *
 * # Safety
 * `mapping` must be NULL or a live handle.
 */
double cbwe_mapping_objective(const struct CbweMapping *mapping);

/**
 * # Safety
 * `mapping` must be NULL or a handle from this library, freed once.
 */
void cbwe_mapping_free(struct CbweMapping *mapping);

/**
 * CSLS acc@1 in percent, rounded to two decimals.
 *
 * # Safety
 * Handles must be live; `out_percent` must be writable.
 */
enum CbweStatus cbwe_evaluate(const struct CbweSpace *mapped_src,
                              const struct CbweSpace *mapped_trg,
                              const struct CbweLexicon *test_lexicon,
                              size_t csls_k,
                              double *out_percent);

/**
 * Runs the full pipeline from a TOML configuration and writes its
 * artifacts. `output_dir` may be NULL to use the configured directory.
 * `out_percent` receives acc@1, or NaN when no test lexicon is configured.
 *
 * # Safety
 * `config_path` must be a NUL-terminated string; `out_percent` must be writable.
 */
enum CbweStatus cbwe_pipeline_run(const char *config_path,
                                  const char *output_dir,
                                  double *out_percent);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CHEAPBWE_H */
