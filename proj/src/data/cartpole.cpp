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

#include "nplab/data/cartpole.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>

#include "nplab/errors.hpp"

namespace nplab::data {

void CartPoleConfig::validate() const {
  if (!(cart_mass > 0) || !(pole_length > 0) || !(dt > 0) || !(pole_mass >= 0) || !(force_max > 0) ||
      substeps < 1 || !(friction >= 0)) {
    throw ConfigError("cartpole: masses, length, dt, force range and substeps must be positive");
  }
}

double wrap_angle(double a) {
  constexpr double pi = std::numbers::pi;
  double w = std::fmod(a + pi, 2.0 * pi);
  if (w < 0) w += 2.0 * pi;
  w -= pi;  // [-pi, pi)
  return w == -pi ? pi : w;
}

CartState cartpole_step(const CartState& s, double action, const CartPoleConfig& cfg) {
  if (!s.allFinite() || !std::isfinite(action)) throw NumericError("cartpole_step: non-finite state or action");
  if (std::abs(action) > cfg.force_max) throw ContractError("cartpole_step: action outside force range");
  const double mc = cfg.cart_mass, mp = cfg.pole_mass, l = cfg.pole_length, g = cfg.gravity;
  const double h = cfg.dt / cfg.substeps;
  double x = s(0), th = s(1), xd = s(2), thd = s(3);
  for (int i = 0; i < cfg.substeps; ++i) {
    const double sn = std::sin(th), cs = std::cos(th);
    const double f = action - cfg.friction * (mc + mp) * g * std::tanh(xd / 0.01);
    const double xdd = (f + mp * sn * (l * thd * thd - g * cs)) / (mc + mp * sn * sn);
    const double thdd = (g * sn - cs * xdd) / l;
    xd += h * xdd;
    thd += h * thdd;
    x += h * xd;
    th += h * thd;
  }
  CartState out(x, wrap_angle(th), xd, thd);
  if (!out.allFinite()) throw NumericError("cartpole_step: state diverged");
  return out;
}

double cartpole_energy(const CartState& s, const CartPoleConfig& cfg) {
  const double mc = cfg.cart_mass, mp = cfg.pole_mass, l = cfg.pole_length;
  const double xd = s(2), thd = s(3), cs = std::cos(s(1));
  return 0.5 * (mc + mp) * xd * xd + mp * l * cs * xd * thd + 0.5 * mp * l * l * thd * thd +
         mp * cfg.gravity * l * (1.0 + cs);
}

TrajectoryDataset generate_trajectories(const std::vector<CartPoleConfig>& configs, int n_traj, int horizon,
                                        std::uint64_t seed) {
  if (configs.empty()) throw ContractError("generate_trajectories: no configs");
  if (n_traj < 1 || horizon < 1) throw ContractError("generate_trajectories: n_traj and horizon must be >= 1");
  TrajectoryDataset ds;
  ds.configs = configs;
  ds.transitions.reserve(configs.size() * static_cast<std::size_t>(n_traj * horizon));
  for (std::size_t e = 0; e < configs.size(); ++e) {
    const CartPoleConfig& cfg = configs[e];
    cfg.validate();
    Rng rng = make_rng(seed, 0xca00 + e);
    std::normal_distribution<double> n(0.0, 0.05);
    std::uniform_real_distribution<double> u(-cfg.force_max, cfg.force_max);
    for (int t = 0; t < n_traj; ++t) {
      CartState s;
      s(0) = n(rng);
      s(1) = wrap_angle(std::numbers::pi + n(rng));
      s(2) = n(rng);
      s(3) = n(rng);
      for (int k = 0; k < horizon; ++k) {
        const double a = u(rng);
        const CartState next = cartpole_step(s, a, cfg);
        ds.transitions.push_back({s, a, next, static_cast<int>(e)});
        s = next;
      }
    }
  }
  return ds;
}

void TrajectoryDataset::env_matrices(int env_id, Matrix& inputs, Matrix& outputs) const {
  Index n = 0;
  for (const auto& t : transitions) n += t.env_id == env_id;
  inputs.resize(n, 5);
  outputs.resize(n, 4);
  Index r = 0;
  for (const auto& t : transitions) {
    if (t.env_id != env_id) continue;
    inputs.row(r).head(4) = t.state.transpose();
    inputs(r, 4) = t.action;
    outputs.row(r) = t.next.transpose();
    ++r;
  }
}

void TrajectoryDataset::all_matrices(Matrix& inputs, Matrix& outputs) const {
  const auto n = static_cast<Index>(transitions.size());
  inputs.resize(n, 5);
  outputs.resize(n, 4);
  for (Index r = 0; r < n; ++r) {
    const auto& t = transitions[static_cast<std::size_t>(r)];
    inputs.row(r).head(4) = t.state.transpose();
    inputs(r, 4) = t.action;
    outputs.row(r) = t.next.transpose();
  }
}

std::string TrajectoryDataset::to_csv() const {
  std::string out =
      "env_id,m_c,f_c,x_c,theta,x_dot,theta_dot,action,next_x_c,next_theta,next_x_dot,next_theta_dot\n";
  char buf[512];
  for (const auto& t : transitions) {
    const auto& c = configs[static_cast<std::size_t>(t.env_id)];
    std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n",
                  t.env_id, c.cart_mass, c.friction, t.state(0), t.state(1), t.state(2), t.state(3), t.action,
                  t.next(0), t.next(1), t.next(2), t.next(3));
    out += buf;
  }
  return out;
}

namespace {

bool in_train_grid(int mi, int fi) { return (mi == 0 || mi == 2 || mi == 4) && (fi == 1 || fi == 3); }

std::vector<CartPoleConfig> grid(const CartPoleConfig& base, bool train) {
  std::vector<CartPoleConfig> out;
  for (int mi = 0; mi < 5; ++mi) {
    for (int fi = 0; fi < 4; ++fi) {
      if (in_train_grid(mi, fi) != train) continue;
      CartPoleConfig c = base;
      c.cart_mass = 0.3 + 0.1 * mi;
      c.friction = 0.06 + 0.02 * fi;
      out.push_back(c);
    }
  }
  return out;
}

}  // namespace

std::vector<CartPoleConfig> cartpole_train_configs(const CartPoleConfig& base) { return grid(base, true); }
std::vector<CartPoleConfig> cartpole_test_configs(const CartPoleConfig& base) { return grid(base, false); }

}  // namespace nplab::data
