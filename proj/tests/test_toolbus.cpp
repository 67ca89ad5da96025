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

#include <gtest/gtest.h>

#include <unistd.h>

#include <set>
#include <thread>

#include "buildops/error.hpp"
#include "buildops/toolbus/bus.hpp"
#include "buildops/toolbus/rpc.hpp"

using namespace buildops;
using namespace buildops::toolbus;

namespace {

ParamSpec p(std::string name, ParamKind kind, bool required = false) {
    ParamSpec s;
    s.name = std::move(name);
    s.kind = kind;
    s.required = required;
    return s;
}

ToolSpec fan_tool() {
    ParamSpec ctrl = p("ctrl_type", ParamKind::Enum);
    ctrl.enum_values = {"constant", "staged", "vfd"};
    ParamSpec cfg = p("fan_ctrl", ParamKind::Map);
    cfg.fields = {ctrl, p("stages", ParamKind::Integer)};
    return ToolSpec{"fan_set", "Set fan", "HVAC System Related Tools",
                    {p("system_id", ParamKind::String, true), p("flow", ParamKind::Number), cfg,
                     p("enabled", ParamKind::Boolean), p("ids", ParamKind::List)}};
}

std::shared_ptr<ToolRegistry> toy_registry() {
    auto r = std::make_shared<ToolRegistry>();
    r->register_tool(fan_tool(), [](const Json& a) { return ToolResult::ok(a, "ok"); });
    r->register_tool(ToolSpec{"boom", "Always throws", "Misc", {}},
                     [](const Json&) -> ToolResult { throw Error("UnknownId", "no such thing"); });
    r->register_tool(ToolSpec{"refuse", "Reports failure", "Misc", {}},
                     [](const Json&) { return ToolResult::fail("not today"); });
    return r;
}

}  // namespace

TEST(Registry, DuplicateNameRejected) {
    ToolRegistry r;
    r.register_tool(fan_tool(), [](const Json&) { return ToolResult::ok({}, ""); });
    try {
        r.register_tool(fan_tool(), [](const Json&) { return ToolResult::ok({}, ""); });
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), "DuplicateName");
    }
}

TEST(Registry, InvalidSpecsRejected) {
    auto handler = [](const Json&) { return ToolResult::ok({}, ""); };
    ToolRegistry r;
    ToolSpec no_category = fan_tool();
    no_category.category.clear();
    EXPECT_THROW(r.register_tool(no_category, handler), Error);
    ToolSpec empty_enum = fan_tool();
    empty_enum.params.push_back(p("mode", ParamKind::Enum));
    EXPECT_THROW(r.register_tool(empty_enum, handler), Error);
    ToolSpec required_default = fan_tool();
    required_default.params[0].default_value = "x";
    try {
        r.register_tool(required_default, handler);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), "InvalidSpec");
    }
    EXPECT_TRUE(r.empty());
}

TEST(Registry, ListingDetailLevelsAndOrder) {
    auto r = toy_registry();
    auto names = r->list_tools(Detail::NamesOnly);
    ASSERT_EQ(names.size(), 3u);
    EXPECT_EQ(names[0].name, "fan_set");
    EXPECT_EQ(names[2].name, "refuse");
    EXPECT_TRUE(names[0].params.empty());
    EXPECT_TRUE(names[0].description.empty());
    EXPECT_EQ(names[0].category, "HVAC System Related Tools");
    auto full = r->list_tools(Detail::Full);
    EXPECT_EQ(full[0].params.size(), 5u);
    EXPECT_THROW(r->describe("nope"), Error);
}

TEST(Validation, ReportsEachViolation) {
    auto r = toy_registry();
    auto v = r->validate_args("fan_set", Json{{"flow", "fast"}, {"color", "red"}, {"fan_ctrl", {{"ctrl_type", "turbo"}}}});
    std::set<std::string> got(v.begin(), v.end());
    EXPECT_TRUE(got.count("missing required system_id"));
    EXPECT_TRUE(got.count("unknown param color"));
    EXPECT_TRUE(got.count("type mismatch for flow: expected number, got string"));
    EXPECT_TRUE(got.count("enum violation for fan_ctrl.ctrl_type: 'turbo' not in {constant, staged, vfd}"));
    EXPECT_EQ(v.size(), 4u);
}

TEST(Validation, AcceptsAndCoercesNumericStrings) {
    const ToolSpec spec = fan_tool();
    Json args{{"system_id", "h1"}, {"flow", "0.4"}, {"enabled", "true"}, {"fan_ctrl", {{"stages", "3"}}}};
    EXPECT_TRUE(validate_args(spec, args).empty());
    Json c = coerce_args(spec, args);
    EXPECT_EQ(c.at("flow"), 0.4);
    EXPECT_EQ(c.at("enabled"), true);
    EXPECT_EQ(c.at("fan_ctrl").at("stages"), 3);
    EXPECT_FALSE(validate_args(spec, Json{{"system_id", "h1"}, {"fan_ctrl", {{"stages", 2.5}}}}).empty());
}

TEST(ToolSpecJson, RoundTrip) {
    ToolSpec spec = fan_tool();
    spec.params[1].default_value = 0.4;
    ToolSpec back = Json(spec).get<ToolSpec>();
    EXPECT_EQ(Json(back), Json(spec));
}

TEST(Bus, EnvelopesNeverCrash) {
    ToolBus bus(toy_registry());
    auto unknown = bus.invoke(ToolCall{"nope", Json::object(), "a"});
    EXPECT_FALSE(unknown.result.success);
    EXPECT_EQ(unknown.result.error->rfind("UnknownTool", 0), 0u);

    auto invalid = bus.invoke(ToolCall{"fan_set", Json::object(), "a"});
    EXPECT_EQ(*invalid.result.error, "ValidationFailed: missing required system_id");

    auto thrown = bus.invoke(ToolCall{"boom", Json::object(), "a"});
    EXPECT_FALSE(thrown.result.success);
    EXPECT_EQ(*thrown.result.error, "UnknownId: no such thing");
    EXPECT_FALSE(thrown.result.data.has_value());

    auto ok = bus.invoke(ToolCall{"fan_set", Json{{"system_id", "h1"}}, "a"});
    EXPECT_TRUE(ok.result.success);
    EXPECT_FALSE(ok.result.error.has_value());
    Json env = ok.result;
    EXPECT_EQ(env, (Json{{"success", true}, {"data", {{"system_id", "h1"}}}, {"message", "ok"}}));
    Json fail = thrown.result;
    EXPECT_EQ(fail, (Json{{"success", false}, {"error", "UnknownId: no such thing"}}));
}

TEST(Bus, AccessPolicyDenies) {
    ToolBus bus(toy_registry(), [](std::string_view caller, std::string_view tool) {
        return caller == "hvac_agent" && tool == "fan_set";
    });
    auto denied = bus.invoke(ToolCall{"refuse", Json::object(), "hvac_agent"});
    EXPECT_EQ(*denied.result.error, "Unauthorized: caller 'hvac_agent' may not call 'refuse'");
    EXPECT_TRUE(bus.invoke(ToolCall{"fan_set", Json{{"system_id", "x"}}, "hvac_agent"}).result.success);
}

TEST(Bus, TraceHasUniqueIdsAndOrderedTimestamps) {
    ToolBus bus(toy_registry());
    for (int i = 0; i < 20; ++i) bus.invoke(ToolCall{i % 2 ? "refuse" : "boom", Json::object(), i % 3 ? "a" : "b"});
    auto trace = bus.trace();
    ASSERT_EQ(trace.size(), 20u);
    std::set<std::string> ids;
    for (const auto& rec : trace) {
        EXPECT_TRUE(ids.insert(rec.call.call_id).second);
        EXPECT_GE(rec.call.end_s, rec.call.start_s);
        EXPECT_FALSE(rec.result.success);
        EXPECT_TRUE(rec.result.error.has_value());
    }
}

TEST(Rpc, DispatcherErrors) {
    ToolBus bus(toy_registry());
    RpcDispatcher d(bus);
    auto parse = Json::parse(d.handle_frame("{not json"));
    EXPECT_EQ(parse.at("error").at("code"), rpc_code::kParseError);
    auto invalid = Json::parse(d.handle_frame(R"({"id":1,"method":"tools/list"})"));
    EXPECT_EQ(invalid.at("error").at("code"), rpc_code::kInvalidRequest);
    auto method = Json::parse(d.handle_frame(R"({"jsonrpc":"2.0","id":2,"method":"tools/zap"})"));
    EXPECT_EQ(method.at("error").at("code"), rpc_code::kMethodNotFound);
    auto params = Json::parse(d.handle_frame(R"({"jsonrpc":"2.0","id":3,"method":"tools/describe","params":{}})"));
    EXPECT_EQ(params.at("error").at("code"), rpc_code::kInvalidParams);
    auto unknown = Json::parse(d.handle_frame(R"({"jsonrpc":"2.0","id":4,"method":"tools/describe","params":{"name":"zz"}})"));
    EXPECT_EQ(unknown.at("error").at("data").at("kind"), "UnknownTool");
    EXPECT_EQ(d.handle_frame(R"({"jsonrpc":"2.0","method":"tools/list"})"), "");
}

TEST(Rpc, StdioRoundTrip) {
    ToolBus bus(toy_registry());
    RpcDispatcher d(bus);
    int to_server[2], to_client[2];
    ASSERT_EQ(pipe(to_server), 0);
    ASSERT_EQ(pipe(to_client), 0);
    std::thread server([&] {
        serve_stdio(d, to_server[0], to_client[1]);
        close(to_client[1]);
    });
    {
        StdioClient client(to_client[0], to_server[1]);
        EXPECT_EQ(client.list_tools(Detail::NamesOnly).size(), 3u);
        EXPECT_EQ(Json(client.describe("fan_set")), Json(fan_tool()));
        auto rec = client.invoke(ToolCall{"fan_set", Json{{"system_id", "h1"}}, "a"});
        EXPECT_TRUE(rec.result.success);
        try {
            client.describe("missing");
            FAIL();
        } catch (const Error& e) {
            EXPECT_EQ(e.kind(), "UnknownTool");
        }
    }
    close(to_server[1]);
    server.join();
    close(to_server[0]);
    close(to_client[0]);
}

TEST(Rpc, TcpSurvivesMalformedFrames) {
    ToolBus bus(toy_registry());
    RpcDispatcher d(bus);
    TcpServer server(d, "127.0.0.1", 0);
    server.start();
    {
        TcpClient raw("127.0.0.1", server.port());
        raw.send_raw_frame("{{{{");
        auto resp = Json::parse(*raw.read_raw_frame());
        EXPECT_EQ(resp.at("error").at("code"), rpc_code::kParseError);
        raw.send_raw_frame("[1,2]");
        EXPECT_EQ(Json::parse(*raw.read_raw_frame()).at("error").at("code"), rpc_code::kInvalidRequest);
        // same connection still serves requests
        auto list = raw.call("tools/list", Json{{"detail", "names_only"}});
        EXPECT_EQ(list.at("tools").size(), 3u);
    }
    {
        TcpClient fresh("127.0.0.1", server.port());
        auto rec = fresh.invoke(ToolCall{"boom", Json::object(), "x"});
        EXPECT_EQ(*rec.result.error, "UnknownId: no such thing");
    }
    server.stop();
}

TEST(Rpc, PortInUse) {
    ToolBus bus(toy_registry());
    RpcDispatcher d(bus);
    TcpServer a(d, "127.0.0.1", 0);
    a.start();
    TcpServer b(d, "127.0.0.1", a.port());
    try {
        b.start();
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), "PortInUse");
    }
    a.stop();
}

TEST(Rpc, ConnectWithoutServerIsTransportUnavailable) {
    try {
        TcpClient c("127.0.0.1", 1);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), "TransportUnavailable");
    }
}
