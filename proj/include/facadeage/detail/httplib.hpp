#pragma once

// Single include point for cpp-httplib so TLS support is configured
// consistently across every translation unit.
#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>
