#pragma once

#include "htme/operator_core.hpp"
#include "htme/eigenops.hpp"
#include "htme/spectral.hpp"
#include "htme/generators.hpp"
#include "htme/evolution.hpp"
#include "htme/scenarios.hpp"
#include "htme/checks.hpp"
#include "htme/io.hpp"
