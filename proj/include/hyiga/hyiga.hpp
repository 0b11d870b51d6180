#pragma once

// Everything except the acceptance checks (hyiga/verify.hpp).
#include "hyiga/benchmarks.hpp"
#include "hyiga/config.hpp"
#include "hyiga/patch_io.hpp"
#include "hyiga/postprocess.hpp"
