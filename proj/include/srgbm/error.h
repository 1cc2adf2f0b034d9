/*
 * Copyright 2026 The SoftRankGBM Authors
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#ifndef SRGBM_ERROR_H_
#define SRGBM_ERROR_H_

#include <stdexcept>
#include <string>

namespace srgbm {

// Base class for all errors raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed or inconsistent data passed to an operation (shape mismatch,
// non-finite values, invalid orderings).
class InvalidInput : public Error {
 public:
  using Error::Error;
};

// A configuration value outside its documented range.
class InvalidParameter : public Error {
 public:
  using Error::Error;
};

// Text input that cannot be parsed; message carries the line number.
class ParseError : public Error {
 public:
  using Error::Error;
};

// Filesystem or stream failure.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace srgbm

#endif  // SRGBM_ERROR_H_
