// Copyright 2026 The qtamper Authors
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

namespace qtamper {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

#define QTAMPER_DEFINE_ERROR(Name)                                             \
    class Name : public Error {                                                \
      public:                                                                  \
        using Error::Error;                                                    \
    }

// qasm frontend
QTAMPER_DEFINE_ERROR(UnsupportedGate);
QTAMPER_DEFINE_ERROR(IndexError);
QTAMPER_DEFINE_ERROR(UnknownBenchmark);

// simulator
QTAMPER_DEFINE_ERROR(CapacityExceeded);
QTAMPER_DEFINE_ERROR(DimensionMismatch);
QTAMPER_DEFINE_ERROR(InvalidArgument);

// adversary
QTAMPER_DEFINE_ERROR(DegenerateCounts);
QTAMPER_DEFINE_ERROR(InvalidLineCount);

// metrics / qaoa
QTAMPER_DEFINE_ERROR(KeyLengthMismatch);
QTAMPER_DEFINE_ERROR(LengthMismatch);
QTAMPER_DEFINE_ERROR(InfeasibleDegree);

// defense
QTAMPER_DEFINE_ERROR(InsufficientShots);

// harness
QTAMPER_DEFINE_ERROR(IoError);

#undef QTAMPER_DEFINE_ERROR

/// Malformed QASM input. Carries the 1-based source line.
class SyntaxError : public Error {
  public:
    SyntaxError(const std::string &what, int line)
        : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
    [[nodiscard]] int line() const noexcept { return line_; }

  private:
    int line_;
};

/// Configuration schema violation; `pointer()` is a JSON pointer to the
/// offending value.
class ConfigError : public Error {
  public:
    ConfigError(const std::string &pointer, const std::string &what)
        : Error(pointer + ": " + what), pointer_(pointer) {}
    [[nodiscard]] const std::string &pointer() const noexcept {
        return pointer_;
    }

  private:
    std::string pointer_;
};

} // namespace qtamper
