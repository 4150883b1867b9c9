#include <math.h>
#include <stdio.h>
#include "entire_dynamics.h"

int main(void) {
    EdFunction *f = NULL;
    if (ed_function_from_json("{\"variant\":\"exp_affine\",\"lambda\":[1,0]}", &f) != ED_STATUS_OK) {
        fprintf(stderr, "parse: %s\n", ed_last_error());
        return 1;
    }
    EdComplex z = {1.0, 0.0}, w;
    if (ed_eval(f, z, &w) != ED_STATUS_OK || fabs(w.re - exp(1.0)) > 1e-15) return 2;
    int member = 0, l = 0;
    EdComplex ten = {10.0, 0.0};
    if (ed_fast_escaping(f, ten, 5.0, 5, 6, &member, &l) != ED_STATUS_OK || !member || l != 0) return 3;
    EdTower t[4];
    if (ed_iterated_max_modulus(f, 5.0, 4, t) != ED_STATUS_OK || t[3].depth < 1) return 4;
    if (ed_function_from_json("{\"variant\":\"nope\"}", &f) != ED_STATUS_PARSE) return 5;
    ed_function_free(f);
    printf("ok %s\n", ed_version());
    return 0;
}
