#pragma once

#include "mechcheck/error.hpp"
#include "mechcheck/model.hpp"
#include "mechcheck/instance_text.hpp"
#include "mechcheck/windeterm.hpp"
#include "mechcheck/mechanisms.hpp"
#include "mechcheck/properties.hpp"
#include "mechcheck/asl.hpp"
#include "mechcheck/asl_parser.hpp"
#include "mechcheck/asl_check.hpp"
#include "mechcheck/interval.hpp"
#include "mechcheck/kernel.hpp"
#include "mechcheck/absint.hpp"
#include "mechcheck/certify.hpp"
