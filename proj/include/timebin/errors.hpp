// Copyright 2026 The timebin Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>

namespace timebin {

/// A mode was addressed that the registry does not contain, or that has
/// already been consumed by a detector.
struct RegistryError : std::out_of_range {
    using std::out_of_range::out_of_range;
};

/// An argument lies outside the domain of an operation (negative photon
/// counts, mismatched photon numbers, out-of-range parameters).
struct DomainError : std::domain_error {
    using std::domain_error::domain_error;
};

/// A matrix failed a unitarity check.
struct ValidationError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Photons were found outside the modes that a qubit encoding allows.
struct EncodingError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace timebin
