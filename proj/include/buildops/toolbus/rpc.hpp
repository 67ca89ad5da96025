/*
 * Copyright 2026 The buildops Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <atomic>
#include <cstdint>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "buildops/toolbus/bus.hpp"

// JSON-RPC 2.0 surface of the tool bus.
//
//   tools/list      params {detail: "names_only" | "full"}   -> {tools: [...]}
//   tools/describe  params {name}                            -> ToolSpec
//   tools/call      params {name, arguments, caller?, call_id?} -> ToolResult envelope
//
// stdio frames are newline-delimited; TCP frames carry a 4-byte big-endian
// length prefix.

namespace buildops::toolbus {

inline constexpr std::size_t kMaxFrameBytes = 16u << 20;

namespace rpc_code {
inline constexpr int kParseError = -32700;
inline constexpr int kInvalidRequest = -32600;
inline constexpr int kMethodNotFound = -32601;
inline constexpr int kInvalidParams = -32602;
inline constexpr int kInternalError = -32603;
}  // namespace rpc_code

/// Stateless request handler; safe to share between connections when the
/// target is thread-safe (ToolBus is).
class RpcDispatcher {
public:
    explicit RpcDispatcher(ToolClient& target) : target_(target) {}

    /// Parses one frame and returns the serialized response. Malformed input
    /// yields a JSON-RPC error response, never an exception. Notifications
    /// (no id) return an empty string.
    std::string handle_frame(std::string_view frame);
    Json handle(const Json& request);

private:
    ToolClient& target_;
};

Json rpc_error(const Json& id, int code, const std::string& message, const std::string& kind = {});

// Frame primitives over raw file descriptors.
void write_all(int fd, std::string_view bytes);
void write_length_prefixed(int fd, std::string_view payload);
/// nullopt on clean EOF before the first header byte. Throws
/// Error("MalformedFrame") when the declared length exceeds kMaxFrameBytes and
/// Error("TransportUnavailable") on a truncated frame.
std::optional<std::string> read_length_prefixed(int fd);

class LineReader {
public:
    explicit LineReader(int fd) : fd_(fd) {}
    /// nullopt on EOF with no pending bytes.
    std::optional<std::string> next();

private:
    int fd_;
    std::string buffer_;
};

/// Serves newline-delimited frames until EOF on in_fd.
void serve_stdio(RpcDispatcher& dispatcher, int in_fd, int out_fd);

class TcpServer {
public:
    TcpServer(RpcDispatcher& dispatcher, std::string host, std::uint16_t port);
    ~TcpServer();
    TcpServer(const TcpServer&) = delete;
    TcpServer& operator=(const TcpServer&) = delete;

    /// Binds and starts accepting. Throws Error("PortInUse") or
    /// Error("TransportUnavailable").
    void start();
    void stop();
    /// Blocks until stop() is called from elsewhere.
    void wait();
    std::uint16_t port() const { return port_; }

private:
    void accept_loop();
    void serve_connection(int fd);

    RpcDispatcher& dispatcher_;
    std::string host_;
    std::uint16_t port_;
    int listen_fd_ = -1;
    std::atomic<bool> running_{false};
    std::thread acceptor_;
    std::mutex conn_mutex_;
    std::vector<int> conn_fds_;
    std::vector<std::thread> workers_;
};

/// Client half: ToolClient over any frame exchange.
class RpcClient : public ToolClient {
public:
    std::vector<ToolSpec> list_tools(Detail detail) override;
    ToolSpec describe(std::string_view name) override;
    CallRecord invoke(ToolCall call) override;

    /// Sends one request and returns the `result` member. Throws Error with
    /// the server-provided kind on an error response.
    Json call(const std::string& method, const Json& params);

protected:
    virtual std::string exchange(const std::string& frame) = 0;

private:
    std::mutex mutex_;
    std::int64_t next_id_ = 1;
    std::uint64_t next_call_ = 1;
};

class StdioClient : public RpcClient {
public:
    StdioClient(int read_fd, int write_fd) : reader_(read_fd), write_fd_(write_fd) {}

protected:
    std::string exchange(const std::string& frame) override;

private:
    LineReader reader_;
    int write_fd_;
};

class TcpClient : public RpcClient {
public:
    /// Throws Error("TransportUnavailable") when nothing listens.
    TcpClient(const std::string& host, std::uint16_t port);
    ~TcpClient() override;
    TcpClient(const TcpClient&) = delete;
    TcpClient& operator=(const TcpClient&) = delete;

    /// Raw access for protocol tests.
    void send_raw_frame(std::string_view payload);
    std::optional<std::string> read_raw_frame();

protected:
    std::string exchange(const std::string& frame) override;

private:
    int fd_ = -1;
};

}  // namespace buildops::toolbus
