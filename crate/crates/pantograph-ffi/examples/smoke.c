/* Smoke test for the C interface. Build from the workspace root with:
 *
 *   cargo build -p pantograph-ffi --release
 *   cc -std=c99 -Wall -Wextra examples/smoke.c -Iinclude \
 *      ../../target/release/libpantograph_ffi.a -lm -o smoke && ./smoke
 */
#include <stdio.h>
#include <math.h>
#include "pantograph.h"

int main(void) {
    PantographSpec *spec = NULL;
    double a[] = {0.5, 0.5}, q[] = {1.0, 0.5};
    if (pantograph_spec_new(a, q, 2, &spec) != PANTOGRAPH_STATUS_OK) return 1;

    PantographSeriesValue out;
    if (pantograph_eval(spec, 1.0, 1e-12, &out) != PANTOGRAPH_STATUS_OK) return 2;
    if (fabs(out.value - 2.465386702684186) > 1e-9) return 3;
    if (out.tail_bound > 1e-12) return 4;

    double lo, hi;
    if (pantograph_sandwich_bounds(spec, 1.0, &lo, &hi) != PANTOGRAPH_STATUS_OK) return 5;
    if (!(lo <= out.value && out.value <= hi)) return 6;

    PantographSeriesValue ml;
    if (pantograph_mittag_leffler(0.5, 1.0, 1e-12, &ml) != PANTOGRAPH_STATUS_OK) return 7;
    if (fabs(ml.value - 5.008980080762283) > 1e-9) return 8;

    PantographSeriesValue sum;
    if (pantograph_eval_addition(spec, 0.4, 0.6, 30, 1e-12, &sum) != PANTOGRAPH_STATUS_OK) return 14;
    if (fabs(sum.value - out.value) > 1e-8) return 15;

    double zre, zim;
    if (pantograph_eval_complex(spec, 1.0, 0.0, 1e-12, &zre, &zim) != PANTOGRAPH_STATUS_OK) return 16;
    if (fabs(zre - out.value) > 1e-12 || zim != 0.0) return 17;

    double values[257], cert;
    if (pantograph_djm_solve(spec, 1.0, 256, 1e-10, 64, values, &cert) != PANTOGRAPH_STATUS_OK) return 9;
    if (fabs(values[256] - out.value) > 1e-4) return 10;

    PantographVerdict verdict;
    double max_re, roots[32];
    size_t count;
    if (pantograph_stability(spec, 0.0, -5.0, 2.0, 40.0, 16, &verdict, &max_re,
                             roots, 16, &count) != PANTOGRAPH_STATUS_OK) return 11;
    if (verdict != PANTOGRAPH_VERDICT_UNSTABLE) return 12; /* sum(a) = 1 > 0 */

    /* error paths map to the documented codes */
    double bad_q[] = {1.0, 1.5};
    PantographSpec *bad = NULL;
    if (pantograph_spec_new(a, bad_q, 2, &bad) != PANTOGRAPH_STATUS_DOMAIN) return 13;
    printf("C smoke: all checks passed; status 2 reads \"%s\"\n",
           pantograph_status_message(PANTOGRAPH_STATUS_DOMAIN));
    pantograph_spec_free(spec);
    return 0;
}
