#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>

#include "oracle_values.hpp"
#include "seeopt/channel.hpp"
#include "seeopt/linalg.hpp"
#include "seeopt/rng.hpp"

namespace testutil {

using seeopt::ComplexMat;
using seeopt::ComplexVec;

inline double rel_err(double got, double want) { return std::abs(got - want) / std::max(1e-300, std::abs(want)); }

inline ComplexMat random_matrix(seeopt::CounterRng& rng, int rows, int cols) {
  ComplexMat m(rows, cols);
  for (int j = 0; j < cols; ++j)
    for (int i = 0; i < rows; ++i) m(i, j) = rng.complex_normal();
  return m;
}

inline ComplexVec random_vector(seeopt::CounterRng& rng, int n) { return random_matrix(rng, n, 1).col(0); }

inline ComplexMat random_hermitian(seeopt::CounterRng& rng, int n) {
  const ComplexMat g = random_matrix(rng, n, n);
  return (g + g.adjoint()) / 2.0;
}

/// G G^H + I
inline ComplexMat random_pd(seeopt::CounterRng& rng, int n) {
  const ComplexMat g = random_matrix(rng, n, n);
  return g * g.adjoint() + ComplexMat::Identity(n, n);
}

inline seeopt::ChannelPair fixture3() {
  seeopt::ChannelPair ch{ComplexVec(3), ComplexVec(3)};
  for (int i = 0; i < 3; ++i) {
    ch.h_tr(i) = oracle::kHtr3[static_cast<std::size_t>(i)];
    ch.h_te(i) = oracle::kHte3[static_cast<std::size_t>(i)];
  }
  return ch;
}

inline seeopt::ChannelPair fixture1() {
  seeopt::ChannelPair ch{ComplexVec(1), ComplexVec(1)};
  ch.h_tr(0) = oracle::kHtr1;
  ch.h_te(0) = oracle::kHte1;
  return ch;
}

inline seeopt::SystemConfig default_config(int n_antennas, double eta0 = -1.0) {
  seeopt::SystemConfig c;
  c.n_antennas = n_antennas;
  if (eta0 >= 0.0) c.qos_floor_bps_hz = eta0;
  return c;
}

}  // namespace testutil
