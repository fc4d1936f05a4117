#include <hesslab/hesslab.h>

/* Compiled as C to keep the public header free of C++ constructs. */
int hl_c_header_sigma(double* out) {
  const double lambda[3] = {1.0, 2.0, 3.0};
  return hl_sigma(lambda, 3, 2, out) == HL_OK ? 0 : 1;
}
