// Copyright 2026 The darksim Authors
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

#include "darksim/error.hpp"

namespace darksim {

const char* to_string(Errc code) noexcept {
    switch (code) {
        case Errc::NotHermitian: return "NotHermitian";
        case Errc::DimMismatch: return "DimMismatch";
        case Errc::DegenerateLabeling: return "DegenerateLabeling";
        case Errc::StepTooLarge: return "StepTooLarge";
        case Errc::Infeasible: return "Infeasible";
        case Errc::ContractUnsatisfied: return "ContractUnsatisfied";
        case Errc::UnderSampled: return "UnderSampled";
        case Errc::ZeroDeviation: return "ZeroDeviation";
        case Errc::ParseError: return "ParseError";
        case Errc::UnknownKey: return "UnknownKey";
        case Errc::InvalidValue: return "InvalidValue";
        case Errc::Io: return "Io";
    }
    return "Unknown";
}

Error::Error(Errc code, const std::string& what)
    : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

bool is_config_error(Errc code) noexcept {
    return code == Errc::ParseError || code == Errc::UnknownKey || code == Errc::InvalidValue;
}

}  // namespace darksim
