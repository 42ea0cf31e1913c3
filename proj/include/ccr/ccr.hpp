#pragma once

// Everything except the command line front end.

#include "ccr/config.hpp"
#include "ccr/error.hpp"
#include "ccr/format.hpp"
#include "ccr/geometry.hpp"
#include "ccr/lexer.hpp"
#include "ccr/motion.hpp"
#include "ccr/parser.hpp"
#include "ccr/report.hpp"
#include "ccr/scene.hpp"
#include "ccr/scheduler.hpp"
#include "ccr/script.hpp"
#include "ccr/svg.hpp"
#include "ccr/trace.hpp"
#include "ccr/validation.hpp"
