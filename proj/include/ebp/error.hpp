/*
   Copyright 2026 The ebp Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ebp {

enum class ErrorCode {
    EmptySupport,
    NegativeWeight,
    NonFinite,
    InvalidParams,
    TailMassPresent,
    DomainError,
    AssumptionViolated,
    ConvergenceFailure,
    NoInteriorMode,
    NegativeRadicand,
    ZeroExtinctSamples,
};

constexpr std::string_view to_string(ErrorCode code) noexcept
{
    switch (code) {
    case ErrorCode::EmptySupport: return "EmptySupport";
    case ErrorCode::NegativeWeight: return "NegativeWeight";
    case ErrorCode::NonFinite: return "NonFinite";
    case ErrorCode::InvalidParams: return "InvalidParams";
    case ErrorCode::TailMassPresent: return "TailMassPresent";
    case ErrorCode::DomainError: return "DomainError";
    case ErrorCode::AssumptionViolated: return "AssumptionViolated";
    case ErrorCode::ConvergenceFailure: return "ConvergenceFailure";
    case ErrorCode::NoInteriorMode: return "NoInteriorMode";
    case ErrorCode::NegativeRadicand: return "NegativeRadicand";
    case ErrorCode::ZeroExtinctSamples: return "ZeroExtinctSamples";
    }
    return "Unknown";
}

/// Single exception type for the library; inspect code() to dispatch.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code)
    {
    }

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

} // namespace ebp
