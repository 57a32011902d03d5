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

#include "exosim/config.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "exosim/errors.hpp"

namespace exosim {

namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;

std::string join(const std::vector<std::string>& parts) {
  std::ostringstream out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out << "; ";
    out << parts[i];
  }
  return out.str();
}

}  // namespace

ValidationError::ValidationError(std::vector<std::string> issues)
    : Error(join(issues)), issues_(std::move(issues)) {}

void IssueList::raise_if_any() const {
  if (!issues_.empty()) throw ValidationError(issues_);
}

ConfigSection::ConfigSection(const Json* node, std::string path, IssueList& issues)
    : node_(node), path_(std::move(path)), issues_(&issues) {
  if (node_ != nullptr && !node_->is_object()) {
    issues_->add(path_ + ": expected an object");
    node_ = nullptr;
  }
}

std::string ConfigSection::qualified(const std::string& key) const {
  return path_.empty() ? key : path_ + "." + key;
}

void ConfigSection::issue(const std::string& key, const std::string& what) {
  issues_->add(qualified(key) + ": " + what);
}

bool ConfigSection::has(const std::string& key) const {
  return node_ != nullptr && node_->contains(key);
}

const Json* ConfigSection::lookup(const std::string& key) {
  seen_.insert(key);
  if (node_ == nullptr) return nullptr;
  auto it = node_->find(key);
  return it == node_->end() ? nullptr : &*it;
}

std::optional<double> ConfigSection::optional_number(const std::string& key) {
  const Json* v = lookup(key);
  if (v == nullptr) return std::nullopt;
  if (!v->is_number()) {
    issue(key, "expected a number");
    return std::nullopt;
  }
  double x = v->get<double>();
  if (!std::isfinite(x)) {
    issue(key, "must be finite");
    return std::nullopt;
  }
  return x;
}

double ConfigSection::number(const std::string& key, double fallback) {
  return optional_number(key).value_or(fallback);
}

std::optional<double> ConfigSection::optional_angle(const std::string& key) {
  auto rad = optional_number(key);
  auto deg = optional_number(key + "_deg");
  if (rad && deg) {
    issue(key, "given both in radians and in degrees");
    return rad;
  }
  if (deg) return *deg * kDegToRad;
  return rad;
}

double ConfigSection::angle(const std::string& key, double fallback_rad) {
  return optional_angle(key).value_or(fallback_rad);
}

int ConfigSection::integer(const std::string& key, int fallback) {
  const Json* v = lookup(key);
  if (v == nullptr) return fallback;
  if (!v->is_number_integer()) {
    issue(key, "expected an integer");
    return fallback;
  }
  return v->get<int>();
}

bool ConfigSection::boolean(const std::string& key, bool fallback) {
  const Json* v = lookup(key);
  if (v == nullptr) return fallback;
  if (!v->is_boolean()) {
    issue(key, "expected true or false");
    return fallback;
  }
  return v->get<bool>();
}

std::string ConfigSection::choice(const std::string& key, const std::string& fallback,
                                  std::initializer_list<const char*> allowed) {
  const Json* v = lookup(key);
  if (v == nullptr) return fallback;
  if (v->is_string()) {
    auto s = v->get<std::string>();
    for (const char* a : allowed) {
      if (s == a) return s;
    }
  }
  std::string opts;
  for (const char* a : allowed) opts += std::string(opts.empty() ? "" : ", ") + a;
  issue(key, "expected one of {" + opts + "}");
  return fallback;
}

std::vector<double> ConfigSection::numbers(const std::string& key,
                                           std::vector<double> fallback) {
  const Json* v = lookup(key);
  if (v == nullptr) return fallback;
  if (!v->is_array()) {
    issue(key, "expected an array of numbers");
    return fallback;
  }
  std::vector<double> out;
  for (const auto& e : *v) {
    if (!e.is_number()) {
      issue(key, "expected an array of numbers");
      return fallback;
    }
    out.push_back(e.get<double>());
  }
  return out;
}

std::vector<double> ConfigSection::angles(const std::string& key,
                                          std::vector<double> fallback_rad) {
  bool has_rad = has(key);
  bool has_deg = has(key + "_deg");
  if (has_rad && has_deg) issue(key, "given both in radians and in degrees");
  if (has_deg) {
    auto deg = numbers(key + "_deg", {});
    seen_.insert(key);
    for (double& d : deg) d *= kDegToRad;
    return deg;
  }
  seen_.insert(key + "_deg");
  return numbers(key, std::move(fallback_rad));
}

ConfigSection ConfigSection::child(const std::string& key) {
  return ConfigSection(lookup(key), qualified(key), *issues_);
}

const Json* ConfigSection::raw(const std::string& key) { return lookup(key); }

void ConfigSection::finish() {
  if (node_ == nullptr) return;
  for (auto it = node_->begin(); it != node_->end(); ++it) {
    if (!seen_.contains(it.key())) issue(it.key(), "unknown key");
  }
}

void check_sections(const Json& doc, std::initializer_list<const char*> allowed,
                    IssueList& issues) {
  if (doc.is_null()) return;  // an empty document means all defaults
  if (!doc.is_object()) {
    issues.add("configuration root must be an object");
    return;
  }
  for (auto it = doc.begin(); it != doc.end(); ++it) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || it.key() == a;
    if (!ok) issues.add(it.key() + ": unknown section");
  }
}

Json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw ValidationError(path + ": " + e.what());
  }
}

Json merge_config(Json base, const Json& overlay) {
  if (!base.is_object() || !overlay.is_object()) return overlay;
  for (auto it = overlay.begin(); it != overlay.end(); ++it) {
    if (base.contains(it.key()) && base[it.key()].is_object() && it->is_object()) {
      base[it.key()] = merge_config(base[it.key()], *it);
    } else {
      base[it.key()] = *it;
    }
  }
  return base;
}

}  // namespace exosim
