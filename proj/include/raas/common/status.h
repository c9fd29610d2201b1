// Copyright 2026 The RaaS Authors
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

#ifndef RAAS_COMMON_STATUS_H_
#define RAAS_COMMON_STATUS_H_

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <variant>

namespace raas {

// Numeric values are part of the IPC ABI (ResponseRecord.status) and must not
// be renumbered.
enum class ErrorCode : uint8_t {
  kOk = 0,
  kInvalidArgument = 1,
  kNodeUnknown = 2,
  kSrqUnsupported = 3,
  kModeMismatch = 4,
  kAlreadyConnected = 5,
  kUdNotConnectable = 6,
  kSelfConnect = 7,
  kArenaFull = 8,
  kIllegalVerb = 9,
  kMsgTooLarge = 10,
  kBadRkey = 11,
  kBadLkey = 12,
  kQueueFull = 13,
  kNotReady = 14,
  kUnknownObject = 15,
  kBadCapacity = 16,
  kFull = 17,
  kEmpty = 18,
  kTimeout = 19,
  kDestUnreachable = 20,
  kVqpnExhausted = 21,
  kContradictoryFlags = 22,
  kUnknownVqpn = 23,
  kBadConfig = 24,
  kDaemonExists = 25,
  kBadFd = 26,
  kClosedWhileWaiting = 27,
  kWouldBlock = 28,
  kPeerClosed = 29,
  kBadMr = 30,
  kMrTooSmall = 31,
  kRnrError = 32,
  kRemoteAccessError = 33,
  kLengthError = 34,
  kTransportError = 35,
  kAddressInUse = 36,
  kShutdown = 37,
  kParseError = 38,
};

std::string_view ErrorCodeName(ErrorCode code);

class [[nodiscard]] Status {
 public:
  Status() = default;
  Status(ErrorCode code, std::string message = {})
      : code_(code), message_(std::move(message)) {}

  static Status Ok() { return Status(); }

  bool ok() const { return code_ == ErrorCode::kOk; }
  ErrorCode code() const { return code_; }
  const std::string& message() const { return message_; }
  std::string ToString() const;

  friend bool operator==(const Status& a, const Status& b) {
    return a.code_ == b.code_;
  }

 private:
  ErrorCode code_ = ErrorCode::kOk;
  std::string message_;
};

// Value-or-error. Accessing value() on an error is a programming bug and
// aborts.
template <typename T>
class [[nodiscard]] Result {
 public:
  Result(T value) : data_(std::move(value)) {}
  Result(Status status) : data_(std::move(status)) {
    if (std::get<Status>(data_).ok()) {
      data_ = Status(ErrorCode::kInvalidArgument, "ok status without value");
    }
  }
  Result(ErrorCode code, std::string message = {})
      : Result(Status(code, std::move(message))) {}

  bool ok() const { return std::holds_alternative<T>(data_); }
  ErrorCode code() const {
    return ok() ? ErrorCode::kOk : std::get<Status>(data_).code();
  }
  Status status() const { return ok() ? Status() : std::get<Status>(data_); }

  T& value() & { return std::get<T>(data_); }
  const T& value() const& { return std::get<T>(data_); }
  T&& value() && { return std::get<T>(std::move(data_)); }

  T& operator*() & { return value(); }
  const T& operator*() const& { return value(); }
  T&& operator*() && { return std::move(*this).value(); }
  T* operator->() { return &value(); }
  const T* operator->() const { return &value(); }

 private:
  std::variant<T, Status> data_;
};

}  // namespace raas

#define RAAS_RETURN_IF_ERROR(expr)       \
  do {                                   \
    ::raas::Status raas_status_ = (expr); \
    if (!raas_status_.ok()) return raas_status_; \
  } while (0)

#endif  // RAAS_COMMON_STATUS_H_
