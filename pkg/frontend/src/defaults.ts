// Prefilled workbench inputs matching the bundled fixtures, so the UI on
// the mock backend replays the recorded session out of the box.

import type { PromptSpecData } from "./types.js";

export const DEFAULT_SPEC: PromptSpecData = {
  system_context:
    "Cloud-native military logistics platform tracking warfighter supplies " +
    "across global bases; classified inventory data must withstand " +
    "nation-state espionage attempts.",
  components: [
    { technology: "AWS EC2", safeguards: ["Amazon GuardDuty to detect anomalous accesses"] },
    {
      technology: "AWS CodeBuild",
      safeguards: ["build logs streamed to CloudWatch with CloudTrail audit"],
    },
    { technology: "AWS CodeGuru", safeguards: ["automated code security review on every commit"] },
  ],
  attack_goals: ["Privilege escalation"],
  tree_root: "Cloud-based military logistics system",
};

export const HOUSE_STYLE: Record<string, Record<string, string>> = {
  attack: { fillcolor: "#ADD8E6" },
  service: { fillcolor: "#00008B" },
  defense: { fillcolor: "#90EE90" },
  goal: { fillcolor: "#FFD700" },
};

export const FIXTURE_COMPONENTS = ["AWS EC2", "AWS CodeBuild", "AWS CodeGuru"];

export const FIXTURE_REFINEMENT_FEEDBACK =
  "Add an explicit reverse-shell listener step to the EC2 branch";

export const DEFAULT_CLOUD_STATE = {
  findings: [],
  instances: [],
  roles: {
    "EC2-CloudWatch-Agent-Role": {
      permissions: ["iam:ListUsers"],
      credentials: {
        key_id: "ASIAMOCKROLEKEY00001",
        secret: "mock-secret-7f3d1c",
        token: "mock-session-token-2b9a",
        expiry: "2025-01-01T06:00:00Z",
      },
    },
  },
  principal_permissions: ["ec2:RequestSpotInstances", "iam:PassRole"],
};

export const DEFAULT_DETECTOR = {
  enabled: true,
  rules: [
    {
      event: "RequestSpotInstances",
      field: "user_data_base64",
      pattern: "^[A-Za-z0-9+/=]{40,}$",
      finding_type: "UnauthorizedAccess:EC2/SuspiciousUserData",
      severity: "HIGH",
    },
  ],
};

export const DEFAULT_SCENARIO = {
  name: "spot-role-privilege-escalation",
  steady_state: ["findings_empty", "no_overprivileged_roles", "detector_enabled"],
  hypothesis: {
    text:
      "Launching a spot instance that passes the privileged role and carries " +
      "a suspicious user-data payload raises a detector finding.",
    expected_finding: "UnauthorizedAccess:EC2/SuspiciousUserData",
  },
  initial_stages: [
    { name: "verify clean detector state", action: "check_findings", params: {}, expected: "" },
  ],
};
