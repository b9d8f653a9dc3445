// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <string_view>

namespace toolagent::detail {

struct HttpTarget {
    std::string scheme_host_port;  // "http://host:port"
    std::string path;              // always begins with '/'
};

/// Splits an http URL; throws Error{invalid_config} on anything else.
HttpTarget split_url(std::string_view url, std::string_view default_path = "/");

} // namespace toolagent::detail
