#include <stdio.h>
#include <string.h>
#include "dynhopf.h"

int main(void) {
    DynhopfSpec *spec = NULL;
    DynhopfDocument *doc = NULL;
    if (dynhopf_spec_new("A1", 3, &spec) != DYNHOPF_STATUS_OK) return 2;
    dynhopf_spec_set_suites(spec, "abrr");
    DynhopfStatus st = dynhopf_verify(spec, &doc);
    printf("%s: exit %d, %zu bytes of JSON\n", dynhopf_status_message(st), dynhopf_document_exit_code(doc), strlen(dynhopf_document_json(doc)));
    dynhopf_document_free(doc);
    dynhopf_spec_free(spec);
    return (int)st;
}
