// Copyright 2026 The nplab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Cart-pole with a point-mass pole. theta = 0 is upright, theta = pi hangs.
//
//   x''     = (F + m_p sin(th) (l th'^2 - g cos(th))) / (m_c + m_p sin^2(th))
//   theta'' = (g sin(th) - cos(th) x'') / l
//
// with ground friction F_f = -f_c (m_c + m_p) g tanh(x' / 0.01) added to F.
// Each dt is split into `substeps` semi-implicit Euler steps.

#ifndef NPLAB_DATA_CARTPOLE_HPP
#define NPLAB_DATA_CARTPOLE_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "nplab/autodiff.hpp"
#include "nplab/parameters.hpp"

namespace nplab::data {

struct CartPoleConfig {
  double cart_mass = 0.5;
  double friction = 0.1;
  double pole_mass = 0.5;
  double pole_length = 0.6;
  double gravity = 9.81;
  double dt = 0.1;
  double force_max = 10.0;
  int substeps = 50;

  void validate() const;
};

/// [x_c, theta, x_c', theta'].
using CartState = Eigen::Vector4d;

CartState cartpole_step(const CartState& s, double action, const CartPoleConfig& cfg);
/// Mechanical energy with the potential zeroed at the hanging rest state,
/// so it is non-negative and relative drift is well defined.
double cartpole_energy(const CartState& s, const CartPoleConfig& cfg);
/// Wraps to (-pi, pi].
double wrap_angle(double a);

struct Transition {
  CartState state;
  double action = 0.0;
  CartState next;
  int env_id = 0;
};

struct TrajectoryDataset {
  std::vector<CartPoleConfig> configs;
  std::vector<Transition> transitions;

  /// Rows of one environment: inputs [state, action] (5), outputs next state (4).
  void env_matrices(int env_id, Matrix& inputs, Matrix& outputs) const;
  void all_matrices(Matrix& inputs, Matrix& outputs) const;
  std::string to_csv() const;
};

/// n_traj random-action trajectories of `horizon` steps per config, starting
/// near the hanging equilibrium. Config i draws from its own stream.
TrajectoryDataset generate_trajectories(const std::vector<CartPoleConfig>& configs, int n_traj, int horizon,
                                        std::uint64_t seed);

/// m_c in {0.3, 0.5, 0.7} x f_c in {0.08, 0.12}.
std::vector<CartPoleConfig> cartpole_train_configs(const CartPoleConfig& base = {});
/// The other 14 pairs of m_c in {0.3..0.7 step 0.1} x f_c in {0.06..0.12 step 0.02}.
std::vector<CartPoleConfig> cartpole_test_configs(const CartPoleConfig& base = {});

}  // namespace nplab::data

#endif  // NPLAB_DATA_CARTPOLE_HPP
