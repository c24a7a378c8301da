#!/usr/bin/env python3
"""
Batch Certify Runner - run `certify` (or `scenario`) over a set of configs and summarize verdicts
"""

import json
import os
import subprocess
import sys
from datetime import datetime

EXIT_VERDICTS = {0: 'OK', 2: 'NOT_STABLE', 1: 'ERROR'}


class BatchCertifyRunner:
    def __init__(self, output_dir='outputs/batch'):
        self.configs = {
            'certify': [
                'cp1_round_config.json',
                'weighted_interval_config.json',
                'destabilized_interval_config.json',
                'cp2_config.json',
            ],
            'scenario': [
                'calabi_dream_config.json',
                'big_class_config.json',
            ],
        }
        self.output_dir = output_dir

    def run_config(self, command, config_path):
        """Run one command on one config in a fresh process"""
        name = os.path.splitext(os.path.basename(config_path))[0]
        out_dir = os.path.join(self.output_dir, name)
        try:
            print(f"🔄 {command} {config_path}...")
            result = subprocess.run([
                sys.executable, 'run_toric.py', command, '--config', config_path, '--output-dir', out_dir
            ], capture_output=True, text=True, timeout=600)
        except subprocess.TimeoutExpired:
            print(f"⏰ {config_path} timed out")
            return {'config': config_path, 'status': 'TIMEOUT', 'verdict': None}

        verdict = None
        report_path = os.path.join(out_dir, f"{command.replace('-', '_')}_report.json")
        if os.path.exists(report_path):
            with open(report_path, 'r') as f:
                verdict = json.load(f).get('verdict')

        status = EXIT_VERDICTS.get(result.returncode, 'ERROR')
        glyph = {'OK': '✅', 'NOT_STABLE': '🎯'}.get(status, '❌')
        print(f"{glyph} {config_path}: {verdict}")
        if status == 'ERROR':
            print(result.stdout.strip() or result.stderr.strip())
        return {'config': config_path, 'status': status, 'verdict': verdict}

    def run_all(self):
        print("🚀 Starting batch certification...\n")
        start_time = datetime.now()
        results = []
        for command, configs in self.configs.items():
            for config_path in configs:
                results.append(dict(self.run_config(command, config_path), command=command))

        duration = datetime.now() - start_time
        print("\n📈 Batch Certification Summary")
        print(f"⏱️  Total time: {duration}")
        errors = sum(1 for r in results if r['status'] in ('ERROR', 'TIMEOUT'))
        print(f"✅ Completed: {len(results) - errors}/{len(results)}")
        for r in results:
            status = "❌" if r['status'] in ('ERROR', 'TIMEOUT') else "✅"
            print(f"  {status} {r['command']:<9} {r['config']:<40} {r['verdict']}")
        return results


def main():
    runner = BatchCertifyRunner()
    print("🎯 Batch Certify Runner")
    print("=" * 50)
    results = runner.run_all()
    print("\n🎉 Batch certification completed!")
    return 1 if any(r['status'] in ('ERROR', 'TIMEOUT') for r in results) else 0


if __name__ == "__main__":
    sys.exit(main())
