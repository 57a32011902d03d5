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

#pragma once

#include <nlohmann/json.hpp>

#include <initializer_list>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace exosim {

using Json = nlohmann::json;

/// Collects validation problems so a whole document can be checked in one
/// pass and every offending key reported together.
class IssueList {
 public:
  void add(std::string issue) { issues_.push_back(std::move(issue)); }
  bool empty() const noexcept { return issues_.empty(); }
  const std::vector<std::string>& items() const noexcept { return issues_; }
  /// Throws ValidationError if anything was recorded.
  void raise_if_any() const;

 private:
  std::vector<std::string> issues_;
};

/// Read-only view of one object in a configuration tree. Every key read is
/// remembered; `finish()` flags the rest as unknown.
///
/// Angles may be given in radians under `key` or in degrees under
/// `key_deg`, never both.
class ConfigSection {
 public:
  ConfigSection(const Json* node, std::string path, IssueList& issues);

  bool present() const noexcept { return node_ != nullptr; }
  bool has(const std::string& key) const;
  const std::string& path() const noexcept { return path_; }

  double number(const std::string& key, double fallback);
  double angle(const std::string& key, double fallback_rad);
  std::optional<double> optional_number(const std::string& key);
  std::optional<double> optional_angle(const std::string& key);
  int integer(const std::string& key, int fallback);
  bool boolean(const std::string& key, bool fallback);
  std::string choice(const std::string& key, const std::string& fallback,
                     std::initializer_list<const char*> allowed);
  std::vector<double> numbers(const std::string& key, std::vector<double> fallback);
  std::vector<double> angles(const std::string& key, std::vector<double> fallback_rad);

  ConfigSection child(const std::string& key);
  /// Raw access for array-of-object keys; marks the key as consumed.
  const Json* raw(const std::string& key);

  void finish();

  /// Records a problem against `key` in this section.
  void issue(const std::string& key, const std::string& what);

 private:
  std::string qualified(const std::string& key) const;
  const Json* lookup(const std::string& key);

  const Json* node_;
  std::string path_;
  IssueList* issues_;
  std::set<std::string> seen_;
};

/// Rejects top-level sections outside `allowed`. A null document passes.
void check_sections(const Json& doc, std::initializer_list<const char*> allowed,
                    IssueList& issues);

Json load_json_file(const std::string& path);

/// Recursive object merge: keys from `overlay` replace those in `base`.
Json merge_config(Json base, const Json& overlay);

}  // namespace exosim
