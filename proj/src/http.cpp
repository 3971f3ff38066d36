#include "vc3d/http.hpp"

#include "vc3d/types.hpp"

#include <httplib.h>

#include <cmath>
#include <regex>

namespace vc3d {

HttpResponse http_post(const std::string& url, const std::string& body, const std::string& content_type,
                       double timeout_s)
{
    static const std::regex re(R"(^(http://[^/]+)(/.*)?$)");
    std::smatch m;
    if (!std::regex_match(url, m, re))
        throw Error("unsupported endpoint URL '" + url + "' (expected http://host[:port]/path)");
    const std::string path = m[2].matched ? m[2].str() : "/";

    httplib::Client cli(m[1].str());
    const auto secs = static_cast<time_t>(std::floor(timeout_s));
    const auto usecs = static_cast<time_t>((timeout_s - std::floor(timeout_s)) * 1e6);
    cli.set_connection_timeout(secs, usecs);
    cli.set_read_timeout(secs, usecs);
    cli.set_write_timeout(secs, usecs);

    auto res = cli.Post(path, body, content_type);
    if (!res)
        throw Error("endpoint unreachable: " + url + " (" + httplib::to_string(res.error()) + ")");
    return {res->status, res->body, res->get_header_value("Content-Type")};
}

}  // namespace vc3d
