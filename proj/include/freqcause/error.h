/*
 * Copyright 2026 The freqcause Authors.
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

#ifndef FREQCAUSE_ERROR_H_
#define FREQCAUSE_ERROR_H_

#include <stdexcept>
#include <string>

namespace freqcause {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Precondition violations: bad sizes, out-of-range indices, mixed lengths.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

// The classifier handle refused a query because its budget is spent.
class BudgetExhausted : public Error {
 public:
  using Error::Error;
};

// Bridge transport failures and malformed or out-of-contract responses.
class BridgeError : public Error {
 public:
  using Error::Error;
};

class ProtocolError : public BridgeError {
 public:
  using BridgeError::BridgeError;
};

}  // namespace freqcause

#endif  // FREQCAUSE_ERROR_H_
