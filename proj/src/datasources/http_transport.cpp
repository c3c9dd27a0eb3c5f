#include "res/datasources/crossref.hpp"

#include <httplib.h>

namespace res::datasources {

HttpGet make_http_get(std::chrono::milliseconds timeout, std::string user_agent) {
    return [timeout, user_agent = std::move(user_agent)](const std::string& url) -> HttpResponse {
        const auto scheme_end = url.find("://");
        const auto path_start = url.find('/', scheme_end == std::string::npos ? 0 : scheme_end + 3);
        const std::string origin = url.substr(0, path_start);
        const std::string path = path_start == std::string::npos ? "/" : url.substr(path_start);

        httplib::Client client(origin);
        const auto secs = std::chrono::duration_cast<std::chrono::seconds>(timeout);
        const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(timeout - secs);
        client.set_connection_timeout(secs.count(), usecs.count());
        client.set_read_timeout(secs.count(), usecs.count());
        client.set_follow_location(true);

        auto result = client.Get(path, httplib::Headers{{"User-Agent", user_agent}});
        if (!result) return HttpResponse{0, httplib::to_string(result.error()), std::nullopt};

        HttpResponse out{result->status, result->body, std::nullopt};
        if (result->has_header("Retry-After")) {
            try {
                out.retry_after = std::chrono::seconds{std::stol(result->get_header_value("Retry-After"))};
            } catch (const std::exception&) {
                // HTTP-date form is not used by Crossref; fall back to backoff
            }
        }
        return out;
    };
}

}  // namespace res::datasources
