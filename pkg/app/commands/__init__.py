from app.commands import advise, coverage, derive, solve, stats, verify

COMMANDS = (solve, advise, stats, verify, derive, coverage)
