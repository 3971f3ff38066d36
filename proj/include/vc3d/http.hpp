#pragma once

#include <string>

namespace vc3d {

struct HttpResponse {
    int status = 0;
    std::string body;
    std::string content_type;
};

// Blocking POST to an http:// URL. Throws vc3d::Error when the server cannot
// be reached; non-2xx statuses are returned, not thrown.
HttpResponse http_post(const std::string& url, const std::string& body, const std::string& content_type,
                       double timeout_s);

}  // namespace vc3d
