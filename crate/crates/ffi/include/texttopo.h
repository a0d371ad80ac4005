#ifndef TEXTTOPO_H
#define TEXTTOPO_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result codes shared by every entry point.
 */
typedef enum TtStatus {
  TT_STATUS_OK = 0,
  TT_STATUS_NULL_POINTER = 1,
  TT_STATUS_INVALID_ARGUMENT = 2,
  /**
   * Input violates a data invariant (asymmetric matrix, too few tokens, ...).
   */
  TT_STATUS_VALIDATION = 3,
  TT_STATUS_PARSE = 4,
  TT_STATUS_IO = 5,
  /**
   * Output buffer is too small; the required length has been written.
   */
  TT_STATUS_BUFFER_TOO_SMALL = 6,
  TT_STATUS_PANIC = 7,
} TtStatus;

/**
 * Smoothing at the ends of a document.
 */
typedef enum TtSmoothing {
  TT_SMOOTHING_TRUNCATE = 0,
  TT_SMOOTHING_RENORMALIZE = 1,
} TtSmoothing;

/**
 * Opaque persistence diagram.
 */
typedef struct TtDiagram TtDiagram;

/**
 * Opaque word-vector table.
 */
typedef struct TtEmbeddings TtEmbeddings;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message describing the most recent failure on this thread, or NULL.
 * The pointer stays valid until the next failing call on this thread.
 */
const char *tt_last_error(void);

/**
 * Rips persistence of an `n x n` row-major distance matrix. A negative
 * `max_scale` builds the full filtration.
 */
enum TtStatus tt_diagram_compute(const double *data,
                                 size_t n,
                                 double max_scale,
                                 struct TtDiagram **out);

/**
 * Number of bars in homological dimension `dim` (0 or 1); 0 for a NULL handle.
 */
size_t tt_diagram_len(const struct TtDiagram *diagram, uint32_t dim);

/**
 * Bar `index` of dimension `dim`. Infinite deaths are reported as `INFINITY`.
 */
enum TtStatus tt_diagram_bar(const struct TtDiagram *diagram,
                             uint32_t dim,
                             size_t index,
                             double *birth,
                             double *death);

void tt_diagram_free(struct TtDiagram *diagram);

/**
 * Betti numbers of the Rips complex at `scale`.
 */
enum TtStatus tt_betti_at_scale(const double *data,
                                size_t n,
                                double scale,
                                size_t *beta0,
                                size_t *beta1);

/**
 * p-Wasserstein distance between two diagrams given as interleaved `(birth, death)` arrays.
 */
enum TtStatus tt_wasserstein(const double *a,
                             size_t a_count,
                             const double *b,
                             size_t b_count,
                             double p,
                             double *out);

/**
 * Embedding-sensitivity features of a `tokens x dims` row-major matrix.
 * Writes `2 * dims` values: dimension 0 scores, then dimension 1 scores.
 */
enum TtStatus tt_embedding_features(const double *psi,
                                    size_t tokens,
                                    size_t dims,
                                    enum TtSmoothing smoothing,
                                    double p,
                                    double *out,
                                    size_t out_len,
                                    size_t *written);

/**
 * TF-IDF block features of a UTF-8 text: `blocks - 1` component deaths then 5 loop statistics.
 */
enum TtStatus tt_tfidf_features(const char *text,
                                size_t blocks,
                                double *out,
                                size_t out_len,
                                size_t *written);

/**
 * Loads word vectors in word2vec text format.
 */
enum TtStatus tt_embeddings_load(const char *path, struct TtEmbeddings **out);

/**
 * Vector dimensionality of a loaded table; 0 for NULL.
 */
size_t tt_embeddings_dim(const struct TtEmbeddings *table);

/**
 * Vocabulary size of a loaded table; 0 for NULL.
 */
size_t tt_embeddings_len(const struct TtEmbeddings *table);

void tt_embeddings_free(struct TtEmbeddings *table);

/**
 * Embedding features of a raw text: tokenized, looked up in `table`, then scored.
 * Writes `2 * tt_embeddings_dim(table)` values.
 */
enum TtStatus tt_text_embedding_features(const struct TtEmbeddings *table,
                                         const char *text,
                                         enum TtSmoothing smoothing,
                                         double p,
                                         double *out,
                                         size_t out_len,
                                         size_t *written);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* TEXTTOPO_H */
