// SPDX-License-Identifier: Apache-2.0
#include "http_url.hpp"

#include "toolagent/error.hpp"

namespace toolagent::detail {

HttpTarget split_url(std::string_view url, std::string_view default_path) {
    constexpr std::string_view scheme = "http://";
    if (!url.starts_with(scheme)) {
        throw Error(Errc::invalid_config, "only http:// URLs are supported", std::string(url));
    }
    auto rest = url.substr(scheme.size());
    const auto slash = rest.find('/');
    const auto authority = rest.substr(0, slash);
    if (authority.empty()) throw Error(Errc::invalid_config, "URL has no host", std::string(url));

    HttpTarget target;
    target.scheme_host_port = std::string(scheme) + std::string(authority);
    if (slash == std::string_view::npos || slash + 1 == rest.size()) {
        target.path = std::string(default_path);
    } else {
        target.path = std::string(rest.substr(slash));
    }
    return target;
}

} // namespace toolagent::detail
