#include <stdio.h>
#include <stdlib.h>
#include <string.h>
#include "syllo.h"

static char *slurp(const char *path) {
    FILE *f = fopen(path, "rb");
    if (!f) return NULL;
    fseek(f, 0, SEEK_END);
    long n = ftell(f);
    fseek(f, 0, SEEK_SET);
    char *buf = malloc(n + 1);
    if (fread(buf, 1, n, f) != (size_t)n) { fclose(f); free(buf); return NULL; }
    buf[n] = 0;
    fclose(f);
    return buf;
}

#define CHECK(cond) do { if (!(cond)) { fprintf(stderr, "failed: %s (%s)\n", #cond, \
    syllo_last_error() ? syllo_last_error() : ""); return 1; } } while (0)

int main(int argc, char **argv) {
    CHECK(argc == 2);
    char *text = slurp(argv[1]);
    CHECK(text != NULL);

    SylloOntology *o = NULL;
    CHECK(syllo_ontology_from_jsonl(text, &o) == SYLLO_STATUS_OK);
    CHECK(syllo_ontology_gene_count(o) >= 20);

    SylloCorpus *c = NULL;
    CHECK(syllo_corpus_build(o, "{\"schemes\":[\"gmp:base\"],\"cap\":2,\"seed\":3}", &c) == SYLLO_STATUS_OK);
    CHECK(syllo_corpus_len(c) == 4);
    CHECK(syllo_corpus_failures(c) == 0);

    char *inst = NULL;
    CHECK(syllo_corpus_instance_json(c, 0, &inst) == SYLLO_STATUS_OK);
    char *prompt = NULL;
    CHECK(syllo_prompt_render(inst, 2, true, &prompt) == SYLLO_STATUS_OK);
    CHECK(strstr(prompt, "C:") != NULL);

    CHECK(syllo_corpus_instance_json(c, 99, &inst) == SYLLO_STATUS_OUT_OF_RANGE);
    CHECK(inst == NULL);

    SylloParsed p;
    CHECK(syllo_classify("True, P2, P1", 2, 3, &p) == SYLLO_STATUS_OK);
    CHECK(p.response_class == SYLLO_RESPONSE_CLASS_FOLLOWING_INSTRUCTION);
    CHECK(p.label == 1 && p.has_premises && p.premise_mask == 3);

    syllo_string_free(prompt);
    syllo_corpus_free(c);
    syllo_ontology_free(o);
    free(text);
    printf("ok %s\n", syllo_version());
    return 0;
}
