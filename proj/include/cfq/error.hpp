// Copyright 2026 The cfq Authors
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

#include <stdexcept>
#include <string>
#include <string_view>

namespace cfq {

/// Every failure the library reports. The enumerator name doubles as the
/// machine-readable error string in CLI output and HTTP bodies.
enum class ErrorCode {
  FileMissing,
  ParseError,
  DuplicateId,
  EmptySource,
  UnknownChallenge,
  EmptyGoal,
  ProviderUnavailable,
  AuthError,
  FixtureMissing,
  BudgetExceeded,
  IoError,
  NoTableFound,
  UnknownQuestion,
  UnknownTheme,
  UnparsableLabel,
  DuplicateTheme,
  ReservedId,
  InvalidArgument,
  IntegrityError,
  SchemaMismatch,
  EmptyMatrix,
  EmptyDataset,
  ConfigError,
  BindError,
  StoreError,
};

std::string_view to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& detail)
      : std::runtime_error(std::string(to_string(code)) + (detail.empty() ? "" : ": " + detail)),
        code_(code),
        detail_(detail) {}

  [[nodiscard]] ErrorCode code() const noexcept { return code_; }
  [[nodiscard]] const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorCode code_;
  std::string detail_;
};

}  // namespace cfq
