// Amplifies the frustrated 2-colouring triangle and prints the spectra.
#include <iostream>

#include "qamp/qamp.hpp"

using namespace qamp;

int main() {
  Matrix equal = Matrix::Zero(4, 4);
  equal(0, 0) = equal(3, 3) = 1.0;
  const auto h = build_layered(3, {LocalProjector({0, 1}, equal), LocalProjector({1, 2}, equal), LocalProjector({0, 2}, equal)});
  const double base = min_eig(h).lambda_min;
  std::cout << "layers " << h.num_layers() << ", lambda_min(H) = " << base << "\n";
  for (int t = 1; t <= 2; ++t) {
    const auto amp = amplify_derandomised(h, t, GraphFamily::CompleteWithLoops);
    const auto tensor = amplify_full_tensor(h, t);
    std::cout << "t=" << t << "  walks " << min_eig(amp).lambda_min << "  (2t bound " << 2 * t * base << ")"
              << "  tensor " << min_eig(tensor).lambda_min << "\n";
  }
}
