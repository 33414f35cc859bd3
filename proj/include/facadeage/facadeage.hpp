#pragma once

// Umbrella header for the zero-shot building age classification harness.

#include "facadeage/corpus.hpp"
#include "facadeage/errors.hpp"
#include "facadeage/fixtures.hpp"
#include "facadeage/gateway.hpp"
#include "facadeage/http_backend.hpp"
#include "facadeage/metrics.hpp"
#include "facadeage/mock_backend.hpp"
#include "facadeage/parsing.hpp"
#include "facadeage/pipeline.hpp"
#include "facadeage/prompting.hpp"
#include "facadeage/report.hpp"
#include "facadeage/taxonomy.hpp"
