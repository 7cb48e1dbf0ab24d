#!/usr/bin/env node
// Reads an SMT-LIB 2 script on stdin (or from a file argument) and prints the
// solver's output on stdout, like `z3 -in`. Exit code 0 on solver completion,
// 1 on internal failure. Timeouts are honored via (set-option :timeout ms)
// inside the script; callers enforce a hard deadline on the process as well.
'use strict';
const fs = require('fs');
const { init } = require('z3-solver');

async function main() {
  const input = fs.readFileSync(process.argv[2] || 0, 'utf8');
  const { Z3 } = await init();
  const cfg = Z3.mk_config();
  const ctx = Z3.mk_context(cfg);
  const out = await Z3.eval_smtlib2_string(ctx, input);
  process.stdout.write(out.endsWith('\n') || out === '' ? out : out + '\n');
  process.exit(0);
}

main().catch(err => {
  process.stderr.write(String(err && err.stack ? err.stack : err) + '\n');
  process.exit(1);
});
