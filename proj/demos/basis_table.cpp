// Builds the prolate basis for a few bandwidths and prints the eigenvalue
// ladder: the flat shoulder of near-unity modes, the brutal plunge past
// n ~ 2c/pi, and the trace identity that pins their sum.
#include <cstdio>

#include "prolatoscope/prolate.hpp"

using namespace prolatoscope;

int main() {
  for (double c : {0.5, 1.0, 3.0}) {
    const ProlateBasis b = build_basis({c, 12, 256});
    std::printf("c = %g   (trace target 2c/pi = %.15f)\n", c, 2.0 * c / kPi);
    std::printf("  n   lambda_n                  1 - lambda_n\n");
    double trace = 0.0;
    for (int n = 0; n < b.num_modes(); ++n) {
      trace += b.lambda(n);
      std::printf("  %2d  %-24s  %.6e\n", n, b.mode(n).lambda.str().c_str(),
                  b.one_minus_lambda(n));
    }
    std::printf("  partial trace %.15f\n\n", trace);
  }
  return 0;
}
