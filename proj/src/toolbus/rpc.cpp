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

#include "buildops/toolbus/rpc.hpp"

#include <arpa/inet.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <sys/socket.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <cstring>

#include "buildops/error.hpp"

namespace buildops::toolbus {

namespace {

Json make_result(const Json& id, Json result) {
    return Json{{"jsonrpc", "2.0"}, {"id", id}, {"result", std::move(result)}};
}

Detail parse_detail(const Json& params) {
    if (!params.is_object() || !params.contains("detail")) return Detail::Full;
    const auto& d = params.at("detail");
    if (!d.is_string()) throw Error("InvalidParams", "detail must be a string");
    if (d == "names_only") return Detail::NamesOnly;
    if (d == "full") return Detail::Full;
    throw Error("InvalidParams", "detail must be names_only or full");
}

ssize_t read_some(int fd, char* buf, std::size_t n) {
    for (;;) {
        ssize_t got = ::read(fd, buf, n);
        if (got < 0 && errno == EINTR) continue;
        return got;
    }
}

bool read_exact(int fd, char* buf, std::size_t n) {
    std::size_t done = 0;
    while (done < n) {
        ssize_t got = read_some(fd, buf + done, n - done);
        if (got <= 0) return false;
        done += static_cast<std::size_t>(got);
    }
    return true;
}

}  // namespace

Json rpc_error(const Json& id, int code, const std::string& message, const std::string& kind) {
    Json err{{"code", code}, {"message", message}};
    if (!kind.empty()) err["data"] = Json{{"kind", kind}};
    return Json{{"jsonrpc", "2.0"}, {"id", id}, {"error", std::move(err)}};
}

Json RpcDispatcher::handle(const Json& request) {
    if (!request.is_object()) {
        return rpc_error(nullptr, rpc_code::kInvalidRequest, "request must be an object");
    }
    Json id = request.contains("id") ? request.at("id") : Json(nullptr);
    if (request.value("jsonrpc", "") != "2.0" || !request.contains("method") ||
        !request.at("method").is_string()) {
        return rpc_error(id, rpc_code::kInvalidRequest, "not a JSON-RPC 2.0 request");
    }
    const auto method = request.at("method").get<std::string>();
    const Json params = request.value("params", Json::object());
    try {
        if (method == "tools/list") {
            Json tools = Json::array();
            auto detail = parse_detail(params);
            for (const auto& spec : target_.list_tools(detail)) {
                if (detail == Detail::Full) {
                    tools.push_back(spec);
                } else {
                    tools.push_back(Json{{"name", spec.name}, {"category", spec.category}});
                }
            }
            return make_result(id, Json{{"tools", std::move(tools)}});
        }
        if (method == "tools/describe") {
            if (!params.is_object() || !params.contains("name") || !params.at("name").is_string()) {
                return rpc_error(id, rpc_code::kInvalidParams, "tools/describe needs a string name");
            }
            return make_result(id, target_.describe(params.at("name").get<std::string>()));
        }
        if (method == "tools/call") {
            if (!params.is_object() || !params.contains("name") || !params.at("name").is_string()) {
                return rpc_error(id, rpc_code::kInvalidParams, "tools/call needs a string name");
            }
            ToolCall call;
            call.tool = params.at("name").get<std::string>();
            call.arguments = params.value("arguments", Json::object());
            call.caller = params.value("caller", "");
            call.call_id = params.value("call_id", "");
            auto record = target_.invoke(std::move(call));
            return make_result(id, record.result);
        }
        return rpc_error(id, rpc_code::kMethodNotFound, "unknown method '" + method + "'");
    } catch (const Error& e) {
        int code = e.kind() == "InvalidParams" || e.kind() == "UnknownTool" ? rpc_code::kInvalidParams
                                                                             : rpc_code::kInternalError;
        return rpc_error(id, code, e.what(), e.kind());
    } catch (const std::exception& e) {
        return rpc_error(id, rpc_code::kInternalError, e.what());
    }
}

std::string RpcDispatcher::handle_frame(std::string_view frame) {
    Json request;
    try {
        request = Json::parse(frame);
    } catch (const Json::parse_error& e) {
        return rpc_error(nullptr, rpc_code::kParseError, std::string("parse error: ") + e.what()).dump();
    }
    if (request.is_object() && !request.contains("id") && request.contains("method")) {
        handle(request);
        return {};
    }
    return handle(request).dump();
}

void write_all(int fd, std::string_view bytes) {
    std::size_t done = 0;
    while (done < bytes.size()) {
        ssize_t put = ::send(fd, bytes.data() + done, bytes.size() - done, MSG_NOSIGNAL);
        if (put < 0 && errno == ENOTSOCK) put = ::write(fd, bytes.data() + done, bytes.size() - done);
        if (put < 0 && errno == EINTR) continue;
        if (put <= 0) throw Error("TransportUnavailable", std::string("write failed: ") + std::strerror(errno));
        done += static_cast<std::size_t>(put);
    }
}

void write_length_prefixed(int fd, std::string_view payload) {
    const auto n = static_cast<std::uint32_t>(payload.size());
    unsigned char header[4] = {static_cast<unsigned char>(n >> 24), static_cast<unsigned char>(n >> 16),
                               static_cast<unsigned char>(n >> 8), static_cast<unsigned char>(n)};
    std::string frame(reinterpret_cast<const char*>(header), 4);
    frame.append(payload);
    write_all(fd, frame);
}

std::optional<std::string> read_length_prefixed(int fd) {
    unsigned char header[4];
    ssize_t got = read_some(fd, reinterpret_cast<char*>(header), 1);
    if (got <= 0) return std::nullopt;
    if (!read_exact(fd, reinterpret_cast<char*>(header) + 1, 3)) {
        throw Error("TransportUnavailable", "truncated frame header");
    }
    std::uint32_t n = (std::uint32_t{header[0]} << 24) | (std::uint32_t{header[1]} << 16) |
                      (std::uint32_t{header[2]} << 8) | std::uint32_t{header[3]};
    if (n > kMaxFrameBytes) {
        throw Error("MalformedFrame", "frame of " + std::to_string(n) + " bytes exceeds limit");
    }
    std::string payload(n, '\0');
    if (n && !read_exact(fd, payload.data(), n)) {
        throw Error("TransportUnavailable", "truncated frame body");
    }
    return payload;
}

std::optional<std::string> LineReader::next() {
    for (;;) {
        auto pos = buffer_.find('\n');
        if (pos != std::string::npos) {
            std::string line = buffer_.substr(0, pos);
            buffer_.erase(0, pos + 1);
            if (!line.empty() && line.back() == '\r') line.pop_back();
            return line;
        }
        char chunk[4096];
        ssize_t got = read_some(fd_, chunk, sizeof chunk);
        if (got <= 0) {
            if (buffer_.empty()) return std::nullopt;
            std::string line = std::move(buffer_);
            buffer_.clear();
            return line;
        }
        buffer_.append(chunk, static_cast<std::size_t>(got));
        if (buffer_.size() > kMaxFrameBytes && buffer_.find('\n') == std::string::npos) {
            buffer_.clear();
            return std::string("\x01oversized");
        }
    }
}

void serve_stdio(RpcDispatcher& dispatcher, int in_fd, int out_fd) {
    LineReader reader(in_fd);
    while (auto line = reader.next()) {
        if (line->find_first_not_of(" \t\r") == std::string::npos) continue;
        std::string response = dispatcher.handle_frame(*line);
        if (response.empty()) continue;
        response.push_back('\n');
        write_all(out_fd, response);
    }
}

TcpServer::TcpServer(RpcDispatcher& dispatcher, std::string host, std::uint16_t port)
    : dispatcher_(dispatcher), host_(std::move(host)), port_(port) {}

TcpServer::~TcpServer() { stop(); }

void TcpServer::start() {
    listen_fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
    if (listen_fd_ < 0) throw Error("TransportUnavailable", "socket() failed");
    int one = 1;
    ::setsockopt(listen_fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_port = htons(port_);
    if (::inet_pton(AF_INET, host_.c_str(), &addr.sin_addr) != 1) {
        ::close(listen_fd_);
        listen_fd_ = -1;
        throw Error("TransportUnavailable", "bad listen address '" + host_ + "'");
    }
    if (::bind(listen_fd_, reinterpret_cast<sockaddr*>(&addr), sizeof addr) < 0) {
        int err = errno;
        ::close(listen_fd_);
        listen_fd_ = -1;
        if (err == EADDRINUSE) throw Error("PortInUse", "port " + std::to_string(port_) + " is in use");
        throw Error("TransportUnavailable", std::string("bind failed: ") + std::strerror(err));
    }
    if (::listen(listen_fd_, 64) < 0) {
        int err = errno;
        ::close(listen_fd_);
        listen_fd_ = -1;
        if (err == EADDRINUSE) throw Error("PortInUse", "port " + std::to_string(port_) + " is in use");
        throw Error("TransportUnavailable", std::string("listen failed: ") + std::strerror(err));
    }
    socklen_t len = sizeof addr;
    ::getsockname(listen_fd_, reinterpret_cast<sockaddr*>(&addr), &len);
    port_ = ntohs(addr.sin_port);
    running_ = true;
    acceptor_ = std::thread([this] { accept_loop(); });
}

void TcpServer::accept_loop() {
    while (running_) {
        int fd = ::accept(listen_fd_, nullptr, nullptr);
        if (fd < 0) {
            if (errno == EINTR) continue;
            break;
        }
        int one = 1;
        ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
        std::lock_guard lock(conn_mutex_);
        if (!running_) {
            ::close(fd);
            break;
        }
        conn_fds_.push_back(fd);
        workers_.emplace_back([this, fd] { serve_connection(fd); });
    }
}

void TcpServer::serve_connection(int fd) {
    try {
        for (;;) {
            std::optional<std::string> frame;
            try {
                frame = read_length_prefixed(fd);
            } catch (const Error& e) {
                if (e.kind() == "MalformedFrame") {
                    // The stream cannot be resynchronized after a bogus length.
                    write_length_prefixed(fd, rpc_error(nullptr, rpc_code::kInvalidRequest, e.what()).dump());
                }
                break;
            }
            if (!frame) break;
            std::string response = dispatcher_.handle_frame(*frame);
            if (!response.empty()) write_length_prefixed(fd, response);
        }
    } catch (const std::exception&) {
        // peer went away
    }
    std::lock_guard lock(conn_mutex_);
    auto it = std::find(conn_fds_.begin(), conn_fds_.end(), fd);
    if (it != conn_fds_.end()) {
        conn_fds_.erase(it);
        ::close(fd);
    }
}

void TcpServer::stop() {
    bool was_running = running_.exchange(false);
    if (listen_fd_ >= 0) {
        ::shutdown(listen_fd_, SHUT_RDWR);
        ::close(listen_fd_);
        listen_fd_ = -1;
    }
    if (acceptor_.joinable()) acceptor_.join();
    std::vector<std::thread> workers;
    {
        std::lock_guard lock(conn_mutex_);
        for (int fd : conn_fds_) ::shutdown(fd, SHUT_RDWR);
        workers.swap(workers_);
    }
    for (auto& w : workers) {
        if (w.joinable()) w.join();
    }
    (void)was_running;
}

void TcpServer::wait() {
    if (acceptor_.joinable()) acceptor_.join();
}

Json RpcClient::call(const std::string& method, const Json& params) {
    std::lock_guard lock(mutex_);
    const std::int64_t id = next_id_++;
    Json request{{"jsonrpc", "2.0"}, {"id", id}, {"method", method}, {"params", params}};
    Json response = Json::parse(exchange(request.dump()));
    if (response.contains("error")) {
        const auto& err = response.at("error");
        std::string kind = "RemoteError";
        if (err.contains("data") && err.at("data").contains("kind")) {
            kind = err.at("data").at("kind").get<std::string>();
        }
        std::string message = err.value("message", "remote error");
        // Messages from Error already carry the "Kind: " prefix.
        if (message.rfind(kind + ": ", 0) == 0) message.erase(0, kind.size() + 2);
        throw Error(kind, message);
    }
    if (response.value("id", Json(nullptr)) != Json(id)) {
        throw Error("MalformedFrame", "response id does not match request id");
    }
    return response.at("result");
}

std::vector<ToolSpec> RpcClient::list_tools(Detail detail) {
    Json result = call("tools/list", Json{{"detail", detail == Detail::Full ? "full" : "names_only"}});
    std::vector<ToolSpec> out;
    for (const auto& t : result.at("tools")) {
        ToolSpec spec;
        spec.name = t.at("name").get<std::string>();
        spec.category = t.value("category", "");
        if (detail == Detail::Full) spec = t.get<ToolSpec>();
        out.push_back(std::move(spec));
    }
    return out;
}

ToolSpec RpcClient::describe(std::string_view name) {
    return call("tools/describe", Json{{"name", std::string(name)}}).get<ToolSpec>();
}

CallRecord RpcClient::invoke(ToolCall call_in) {
    if (call_in.call_id.empty()) {
        std::lock_guard lock(mutex_);
        call_in.call_id = (call_in.caller.empty() ? std::string("anonymous") : call_in.caller) + "#" +
                          std::to_string(next_call_++);
    }
    if (call_in.arguments.is_null()) call_in.arguments = Json::object();
    call_in.start_s = wall_clock_s();
    ToolResult result;
    try {
        Json params{{"name", call_in.tool},
                    {"arguments", call_in.arguments},
                    {"caller", call_in.caller},
                    {"call_id", call_in.call_id}};
        result = call("tools/call", params).get<ToolResult>();
    } catch (const std::exception& e) {
        result = ToolResult::fail(e.what());
    }
    call_in.end_s = std::max(wall_clock_s(), call_in.start_s);
    return CallRecord{std::move(call_in), std::move(result)};
}

std::string StdioClient::exchange(const std::string& frame) {
    write_all(write_fd_, frame + "\n");
    auto line = reader_.next();
    if (!line) throw Error("TransportUnavailable", "server closed the stdio stream");
    return *line;
}

TcpClient::TcpClient(const std::string& host, std::uint16_t port) {
    addrinfo hints{};
    hints.ai_family = AF_INET;
    hints.ai_socktype = SOCK_STREAM;
    addrinfo* res = nullptr;
    if (::getaddrinfo(host.c_str(), std::to_string(port).c_str(), &hints, &res) != 0 || !res) {
        throw Error("TransportUnavailable", "cannot resolve '" + host + "'");
    }
    fd_ = ::socket(res->ai_family, res->ai_socktype, res->ai_protocol);
    int rc = fd_ < 0 ? -1 : ::connect(fd_, res->ai_addr, res->ai_addrlen);
    ::freeaddrinfo(res);
    if (rc < 0) {
        if (fd_ >= 0) ::close(fd_);
        fd_ = -1;
        throw Error("TransportUnavailable",
                    "cannot connect to " + host + ":" + std::to_string(port));
    }
    int one = 1;
    ::setsockopt(fd_, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
}

TcpClient::~TcpClient() {
    if (fd_ >= 0) ::close(fd_);
}

void TcpClient::send_raw_frame(std::string_view payload) { write_length_prefixed(fd_, payload); }

std::optional<std::string> TcpClient::read_raw_frame() { return read_length_prefixed(fd_); }

std::string TcpClient::exchange(const std::string& frame) {
    write_length_prefixed(fd_, frame);
    auto response = read_length_prefixed(fd_);
    if (!response) throw Error("TransportUnavailable", "server closed the connection");
    return *response;
}

}  // namespace buildops::toolbus
