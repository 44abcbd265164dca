/* Worked hedge through the C ABI. Build:
 *   cargo build -p ilhedge-ffi
 *   cc -I crates/ffi/include crates/ffi/examples/smoke.c \
 *      target/debug/libilhedge_ffi.a -lpthread -ldl -lm -o smoke
 */
#include <stdio.h>
#include "ilhedge.h"

#define CHECK(call)                                                          \
    do {                                                                     \
        IlhStatus st_ = (call);                                              \
        if (st_ != ILH_STATUS_OK) {                                          \
            fprintf(stderr, "%s failed (%d): %s\n", #call, (int)st_,         \
                    ilh_last_error_message());                               \
            return 1;                                                        \
        }                                                                    \
    } while (0)

int main(void) {
    IlhPool *pool = NULL;
    CHECK(ilh_pool_from_capital(2000.0, 100.0, &pool));

    double il = 0.0;
    CHECK(ilh_pool_il(pool, 400.0, &il));

    double q_p = 0.0, q_c = 0.0;
    CHECK(ilh_quantity_bounds(pool, 64.0, 156.25, &q_p, &q_c));

    IlhStrangleParams s = {64.0, 156.25, q_p, q_c, 2.0, 3.0};
    IlhHedge *hedge = NULL;
    CHECK(ilh_hedge_new(pool, &s, 0.05, &hedge));

    IlhCoverageReport rep;
    CHECK(ilh_hedge_check(hedge, 64.0, 156.25, 0, &rep));

    printf("il(400)=%g q_p=%g q_c=%g required=%g min_pnl=%g at %g covered=%d\n",
           il, q_p, q_c, rep.required_pool_return, rep.grid_min_pnl,
           rep.grid_argmin, (int)rep.covered);

    if (ilh_pool_il(pool, -1.0, &il) != ILH_STATUS_INVALID_ARGUMENT) return 1;

    ilh_hedge_free(hedge);
    ilh_pool_free(pool);
    return rep.covered ? 0 : 1;
}
