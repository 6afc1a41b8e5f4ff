#pragma once

#include <string>

#include <httplib.h>

#include "store.hpp"

namespace restopath::service {

/// Registers the REST routes. Every error body is
/// {"error": {"code": ..., "message": ...}}.
void install_routes(httplib::Server& server, SessionStore& store);

/// Blocks serving on host:port. Returns false when the port cannot be bound.
bool serve(SessionStore& store, const std::string& host, int port);

} // namespace restopath::service
