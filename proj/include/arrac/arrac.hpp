#pragma once

#include "arrac/error.hpp"
#include "arrac/core.hpp"
#include "arrac/predicate.hpp"
#include "arrac/transform.hpp"
#include "arrac/algebra.hpp"
#include "arrac/distribution.hpp"
#include "arrac/relbridge.hpp"
#include "arrac/text_format.hpp"
#include "arrac/table_io.hpp"
#include "arrac/qlang/ast.hpp"
#include "arrac/qlang/parser.hpp"
#include "arrac/qlang/printer.hpp"
#include "arrac/qlang/eval.hpp"
#include "arrac/catalog_io.hpp"
