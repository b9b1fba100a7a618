#ifndef SYLLO_H
#define SYLLO_H

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

typedef enum SylloStatus {
  SYLLO_STATUS_OK = 0,
  SYLLO_STATUS_NULL_POINTER = 1,
  SYLLO_STATUS_INVALID_UTF8 = 2,
  SYLLO_STATUS_INVALID_INPUT = 3,
  SYLLO_STATUS_OUT_OF_RANGE = 4,
  SYLLO_STATUS_INTERNAL = 5,
} SylloStatus;

typedef enum SylloResponseClass {
  SYLLO_RESPONSE_CLASS_EMPTY = 0,
  SYLLO_RESPONSE_CLASS_IRRELEVANT = 1,
  SYLLO_RESPONSE_CLASS_FOLLOWING_INSTRUCTION = 2,
} SylloResponseClass;

/**
 * Opaque generated corpus.
 */
typedef struct SylloCorpus SylloCorpus;

/**
 * Opaque loaded ontology.
 */
typedef struct SylloOntology SylloOntology;

typedef struct SylloParsed {
  enum SylloResponseClass response_class;
  /**
   * 1 for True, 0 for False, -1 when no label was read.
   */
  int32_t label;
  bool cot_like;
  /**
   * Whether `premise_mask` carries a premise selection.
   */
  bool has_premises;
  /**
   * Bit `k - 1` set when premise `k` was selected.
   */
  uint64_t premise_mask;
} SylloParsed;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or null. Valid until the
 * next failing call on the same thread.
 */
const char *syllo_last_error(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *syllo_version(void);

/**
 * # Safety
 * `s` must be null or a string returned by this library, freed once.
 */
void syllo_string_free(char *s);

/**
 * Parses ontology JSONL text.
 *
 * # Safety
 * `jsonl` must be a NUL-terminated string; `out` a writable pointer.
 */
enum SylloStatus syllo_ontology_from_jsonl(const char *jsonl, struct SylloOntology **out);

/**
 * # Safety
 * `o` must be null or a handle from [`syllo_ontology_from_jsonl`], freed once.
 */
void syllo_ontology_free(struct SylloOntology *o);

/**
 * # Safety
 * `o` must be null or a live ontology handle.
 */
size_t syllo_ontology_pathway_count(const struct SylloOntology *o);

/**
 * # Safety
 * `o` must be null or a live ontology handle.
 */
size_t syllo_ontology_gene_count(const struct SylloOntology *o);

/**
 * Builds and verifies a corpus. `config_json` may be null for defaults, or a
 * JSON object overriding any of `schemes`, `cap`, `min_distractors`,
 * `max_distractors`, `seed`, `synthetic_names`, `strategies`.
 *
 * # Safety
 * `o` must be a live ontology handle; `config_json` null or NUL-terminated;
 * `out` writable.
 */
enum SylloStatus syllo_corpus_build(const struct SylloOntology *o,
                                    const char *config_json,
                                    struct SylloCorpus **out);

/**
 * # Safety
 * `c` must be null or a handle from [`syllo_corpus_build`], freed once.
 */
void syllo_corpus_free(struct SylloCorpus *c);

/**
 * # Safety
 * `c` must be null or a live corpus handle.
 */
size_t syllo_corpus_len(const struct SylloCorpus *c);

/**
 * Instances whose build-time verification failed.
 *
 * # Safety
 * `c` must be null or a live corpus handle.
 */
size_t syllo_corpus_failures(const struct SylloCorpus *c);

/**
 * Instance `index` as a JSON object.
 *
 * # Safety
 * `c` must be a live corpus handle; `out` writable.
 */
enum SylloStatus syllo_corpus_instance_json(const struct SylloCorpus *c, size_t index, char **out);

/**
 * Prompt text for an instance (as produced by
 * [`syllo_corpus_instance_json`]); `task` is 1 or 2, `few_shot` selects the
 * demonstration layout.
 *
 * # Safety
 * `instance_json` must be NUL-terminated; `out` writable.
 */
enum SylloStatus syllo_prompt_render(const char *instance_json,
                                     uint32_t task,
                                     bool few_shot,
                                     char **out);

/**
 * Classifies one model output for a prompt with `n_premises` premises.
 * Premise numbers above 64 cannot be represented in the mask and make
 * the call fail with `OutOfRange`.
 *
 * # Safety
 * `text` must be NUL-terminated; `out` writable.
 */
enum SylloStatus syllo_classify(const char *text,
                                uint32_t task,
                                size_t n_premises,
                                struct SylloParsed *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SYLLO_H */
