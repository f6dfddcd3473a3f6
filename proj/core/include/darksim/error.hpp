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

#pragma once

#include <stdexcept>
#include <string>

namespace darksim {

enum class Errc {
    NotHermitian,
    DimMismatch,
    DegenerateLabeling,
    StepTooLarge,
    Infeasible,
    ContractUnsatisfied,
    UnderSampled,
    ZeroDeviation,
    ParseError,
    UnknownKey,
    InvalidValue,
    Io,
};

const char* to_string(Errc code) noexcept;

class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& what);
    Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

// Config-side failures map to CLI exit code 2, everything else to 3.
bool is_config_error(Errc code) noexcept;

}  // namespace darksim
