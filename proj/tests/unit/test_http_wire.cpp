#include <gtest/gtest.h>

#include <blockscope/error.hpp>
#include <blockscope/http_wire.hpp>

using namespace blockscope;
namespace http = blockscope::http;

TEST(HttpWire, RequestSerialization) {
    http::Request r;
    r.target = "/redirect.php?n=1";
    r.headers = {{"Host", "10.16.6.41"}};
    EXPECT_EQ(r.request_line(), "GET /redirect.php?n=1 HTTP/1.1");
    EXPECT_EQ(r.serialize(), "GET /redirect.php?n=1 HTTP/1.1\r\nHost: 10.16.6.41\r\n\r\n");
}

TEST(HttpWire, ParsesRequestHead) {
    const auto r = http::parse_request("GET /a HTTP/1.1\r\nhost: Example.com\r\nX: y\r\n\r\n");
    ASSERT_TRUE(r);
    EXPECT_EQ(r->target, "/a");
    EXPECT_EQ(r->header("Host"), "Example.com");
    EXPECT_FALSE(http::parse_request("garbage\r\n\r\n").has_value());
    EXPECT_FALSE(http::parse_request("GET /a\r\n\r\n").has_value());
}

TEST(HttpWire, ResponseSummaryAndFraming) {
    const auto resp = http::make_response(302, "text/html", "moved", {{"Location", "http://10.16.6.41/"}});
    EXPECT_EQ(resp.summary(), "HTTP/1.1 302 Found (text/html)");
    const std::string wire = resp.serialize();
    EXPECT_NE(wire.find("Content-Length: 5\r\n"), std::string::npos);
    EXPECT_TRUE(http::response_complete(wire));
    EXPECT_FALSE(http::response_complete(wire.substr(0, wire.size() - 1)));
    const auto back = http::parse_response(wire);
    EXPECT_EQ(back.status, 302);
    EXPECT_EQ(back.body, "moved");
    EXPECT_EQ(back.header("location"), "http://10.16.6.41/");
}

TEST(HttpWire, ChunkedAndCloseDelimitedBodies) {
    const std::string chunked =
        "HTTP/1.1 200 OK\r\nTransfer-Encoding: chunked\r\n\r\n4\r\nWiki\r\n5\r\npedia\r\n0\r\n\r\n";
    EXPECT_TRUE(http::response_complete(chunked));
    EXPECT_EQ(http::parse_response(chunked).body, "Wikipedia");

    const std::string until_close = "HTTP/1.0 200 OK\r\nContent-Type: text/plain\r\n\r\nall of it";
    EXPECT_FALSE(http::response_complete(until_close));
    EXPECT_EQ(http::parse_response(until_close).body, "all of it");
}

TEST(HttpWire, InvalidStatusLineThrows) {
    EXPECT_THROW(http::parse_response("SMTP ready\r\n\r\n"), FormatError);
    EXPECT_THROW(http::parse_response("HTTP/1.1 abc OK\r\n\r\n"), FormatError);
}

TEST(HttpWire, ObservationFromResponse) {
    const auto resp = http::make_response(200, "text/html", "body", {{"Last-Modified", "Fri, 19 Apr 2013 00:00:00 GMT"}});
    const auto obs = http::to_observation("youtube.com", "/", resp);
    EXPECT_EQ(obs.status, 200);
    EXPECT_EQ(obs.last_modified, "Fri, 19 Apr 2013 00:00:00 GMT");
    EXPECT_EQ(obs.body_excerpt, "body");
    EXPECT_FALSE(obs.location.has_value());
}
