// Copyright 2026 The exosim Authors
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

#include "exosim/trace.hpp"

#include <ostream>
#include <utility>

#include "exosim/format.hpp"

namespace exosim {

namespace {

using Column = std::pair<std::string, const std::vector<double>*>;

std::vector<Column> columns(const SimulationTrace& tr) {
  std::vector<Column> cols = {
      {"t_s", &tr.t}, {"clock_s", &tr.clock},           {"theta_rad", &tr.theta},       {"theta_dot_rad_s", &tr.theta_dot},
      {"tau_motor_Nm", &tr.tau_motor}, {"theta_d_rad", &tr.theta_d}, {"phi_rad", &tr.phi},
      {"phi_dot_rad_s", &tr.phi_dot},  {"phi_ddot_rad_s2", &tr.phi_ddot},
      {"fx_N", &tr.fx},         {"fy_N", &tr.fy},               {"fz_N", &tr.fz},
      {"tau_mcp_Nm", &tr.tau_mcp},     {"residual_Nm", &tr.residual},
      {"vm_x_m", &tr.vm_x},     {"vm_y_m", &tr.vm_y},           {"vm_vx_m_s", &tr.vm_vx},
      {"vm_vy_m_s", &tr.vm_vy},
  };
  if (!tr.thumb_angle.empty()) cols.emplace_back("thumb_angle_rad", &tr.thumb_angle);
  cols.insert(cols.end(), {{"kinetic_J", &tr.kinetic},
                           {"potential_J", &tr.potential},
                           {"work_in_J", &tr.work_in},
                           {"dissipated_J", &tr.dissipated}});
  return cols;
}

}  // namespace

void write_trace_csv(const SimulationTrace& tr, std::ostream& out) {
  const auto cols = columns(tr);
  bool first = true;
  for (const auto& [name, _] : cols) {
    out << (first ? "" : ",") << name;
    first = false;
  }
  for (const auto& m : tr.muscle_names) out << ",force_" << m << "_N";
  for (const auto& m : tr.muscle_names) out << ",act_" << m << "_1";
  out << '\n';
  for (std::size_t k = 0; k < tr.size(); ++k) {
    first = true;
    for (const auto& [_, data] : cols) {
      out << (first ? "" : ",") << format_number((*data)[k]);
      first = false;
    }
    for (const auto& f : tr.muscle_force) out << ',' << format_number(f[k]);
    for (const auto& a : tr.activation) out << ',' << format_number(a[k]);
    out << '\n';
  }
}

void write_sensor_csv(const SimulationTrace& tr, std::ostream& out) {
  const auto& s = tr.sensor;
  out << "t,theta_rad,fx_N,fy_N,fz_N\n";
  for (std::size_t k = 0; k < s.t.size(); ++k) {
    out << format_number(s.t[k]) << ',' << format_number(s.theta[k]) << ','
        << format_number(s.fx[k]) << ',' << format_number(s.fy[k]) << ','
        << format_number(s.fz[k]) << '\n';
  }
}

void write_trace_columns(const SimulationTrace& tr, std::ostream& out) {
  const auto cols = columns(tr);
  out << '#';
  int index = 1;
  for (const auto& [name, _] : cols) out << ' ' << index++ << ':' << name;
  out << '\n';
  for (std::size_t k = 0; k < tr.size(); ++k) {
    bool first = true;
    for (const auto& [_, data] : cols) {
      out << (first ? "" : " ") << format_number((*data)[k]);
      first = false;
    }
    out << '\n';
  }
}

}  // namespace exosim
