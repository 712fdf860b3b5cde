#pragma once

#define GEPSOC_VERSION "1.0.0"
