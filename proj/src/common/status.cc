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

#include "raas/common/status.h"

namespace raas {

std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kOk: return "OK";
    case ErrorCode::kInvalidArgument: return "INVALID_ARGUMENT";
    case ErrorCode::kNodeUnknown: return "NODE_UNKNOWN";
    case ErrorCode::kSrqUnsupported: return "SRQ_UNSUPPORTED";
    case ErrorCode::kModeMismatch: return "MODE_MISMATCH";
    case ErrorCode::kAlreadyConnected: return "ALREADY_CONNECTED";
    case ErrorCode::kUdNotConnectable: return "UD_NOT_CONNECTABLE";
    case ErrorCode::kSelfConnect: return "SELF_CONNECT";
    case ErrorCode::kArenaFull: return "ARENA_FULL";
    case ErrorCode::kIllegalVerb: return "ILLEGAL_VERB";
    case ErrorCode::kMsgTooLarge: return "MSG_TOO_LARGE";
    case ErrorCode::kBadRkey: return "BAD_RKEY";
    case ErrorCode::kBadLkey: return "BAD_LKEY";
    case ErrorCode::kQueueFull: return "QUEUE_FULL";
    case ErrorCode::kNotReady: return "NOT_READY";
    case ErrorCode::kUnknownObject: return "UNKNOWN_OBJECT";
    case ErrorCode::kBadCapacity: return "BAD_CAPACITY";
    case ErrorCode::kFull: return "FULL";
    case ErrorCode::kEmpty: return "EMPTY";
    case ErrorCode::kTimeout: return "TIMEOUT";
    case ErrorCode::kDestUnreachable: return "DEST_UNREACHABLE";
    case ErrorCode::kVqpnExhausted: return "VQPN_EXHAUSTED";
    case ErrorCode::kContradictoryFlags: return "CONTRADICTORY_FLAGS";
    case ErrorCode::kUnknownVqpn: return "UNKNOWN_VQPN";
    case ErrorCode::kBadConfig: return "BAD_CONFIG";
    case ErrorCode::kDaemonExists: return "DAEMON_EXISTS";
    case ErrorCode::kBadFd: return "BAD_FD";
    case ErrorCode::kClosedWhileWaiting: return "CLOSED_WHILE_WAITING";
    case ErrorCode::kWouldBlock: return "WOULD_BLOCK";
    case ErrorCode::kPeerClosed: return "PEER_CLOSED";
    case ErrorCode::kBadMr: return "BAD_MR";
    case ErrorCode::kMrTooSmall: return "MR_TOO_SMALL";
    case ErrorCode::kRnrError: return "RNR_ERROR";
    case ErrorCode::kRemoteAccessError: return "REMOTE_ACCESS_ERROR";
    case ErrorCode::kLengthError: return "LENGTH_ERROR";
    case ErrorCode::kTransportError: return "TRANSPORT_ERROR";
    case ErrorCode::kAddressInUse: return "ADDRESS_IN_USE";
    case ErrorCode::kShutdown: return "SHUTDOWN";
    case ErrorCode::kParseError: return "PARSE_ERROR";
  }
  return "UNKNOWN";
}

std::string Status::ToString() const {
  std::string out(ErrorCodeName(code_));
  if (!message_.empty()) {
    out += ": ";
    out += message_;
  }
  return out;
}

}  // namespace raas
