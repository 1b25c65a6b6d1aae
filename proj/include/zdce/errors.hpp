/*
 * Copyright 2026 The zdce Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *    http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <stdexcept>
#include <string>

namespace zdce {

class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Tensor shapes that do not fit together.
class ShapeError : public Error {
public:
  using Error::Error;
};

// Invalid configuration values (architecture, loss weights, training knobs).
class ConfigError : public Error {
public:
  using Error::Error;
};

// Misuse of an API contract, e.g. backward from a non-scalar.
class ContractError : public Error {
public:
  using Error::Error;
};

class IoError : public Error {
public:
  using Error::Error;
};

enum class FormatErrc { bad_magic, bad_version, shape_mismatch, bad_header };

const char* to_string(FormatErrc code);

// Malformed weights or optimizer-state file.
class FormatError : public Error {
public:
  FormatError(FormatErrc code, const std::string& what)
      : Error(std::string(to_string(code)) + ": " + what), code_(code) {}

  FormatErrc code() const noexcept { return code_; }

private:
  FormatErrc code_;
};

// Training produced a NaN or infinite loss.
class NonFiniteLossError : public Error {
public:
  using Error::Error;
};

} // namespace zdce
