#pragma once

// Umbrella header for the GDELT knowledge-graph toolkit.

#include "gdeltkg/util.hpp"
#include "gdeltkg/toml.hpp"
#include "gdeltkg/schema.hpp"
#include "gdeltkg/records.hpp"
#include "gdeltkg/ingest.hpp"
#include "gdeltkg/html.hpp"
#include "gdeltkg/fetch.hpp"
#include "gdeltkg/graph.hpp"
#include "gdeltkg/build.hpp"
#include "gdeltkg/query.hpp"
#include "gdeltkg/tokenize.hpp"
#include "gdeltkg/clients.hpp"
#include "gdeltkg/http_clients.hpp"
#include "gdeltkg/store.hpp"
#include "gdeltkg/qa.hpp"
#include "gdeltkg/eval.hpp"
#include "gdeltkg/config.hpp"
