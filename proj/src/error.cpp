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

#include "cfq/error.hpp"

namespace cfq {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::FileMissing: return "FileMissing";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::DuplicateId: return "DuplicateId";
    case ErrorCode::EmptySource: return "EmptySource";
    case ErrorCode::UnknownChallenge: return "UnknownChallenge";
    case ErrorCode::EmptyGoal: return "EmptyGoal";
    case ErrorCode::ProviderUnavailable: return "ProviderUnavailable";
    case ErrorCode::AuthError: return "AuthError";
    case ErrorCode::FixtureMissing: return "FixtureMissing";
    case ErrorCode::BudgetExceeded: return "BudgetExceeded";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::NoTableFound: return "NoTableFound";
    case ErrorCode::UnknownQuestion: return "UnknownQuestion";
    case ErrorCode::UnknownTheme: return "UnknownTheme";
    case ErrorCode::UnparsableLabel: return "UnparsableLabel";
    case ErrorCode::DuplicateTheme: return "DuplicateTheme";
    case ErrorCode::ReservedId: return "ReservedId";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::IntegrityError: return "IntegrityError";
    case ErrorCode::SchemaMismatch: return "SchemaMismatch";
    case ErrorCode::EmptyMatrix: return "EmptyMatrix";
    case ErrorCode::EmptyDataset: return "EmptyDataset";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::BindError: return "BindError";
    case ErrorCode::StoreError: return "StoreError";
  }
  return "Unknown";
}

}  // namespace cfq
