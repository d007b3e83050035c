#pragma once

// Umbrella header for the whole library.

#include "opequiv/error.hpp"
#include "opequiv/rational.hpp"
#include "opequiv/cardinal.hpp"
#include "opequiv/tail.hpp"
#include "opequiv/spectral_model.hpp"
#include "opequiv/sequence.hpp"
#include "opequiv/bucket_matcher.hpp"
#include "opequiv/conditions.hpp"
#include "opequiv/engine.hpp"
#include "opequiv/json_io.hpp"
#include "opequiv/commands.hpp"
