from rest_framework import serializers

from isingldpc.defaults import setting
from .models import ALGORITHMS, SCHEDULES, BpConfig


class BpConfigSerializer(serializers.Serializer):
    algorithm = serializers.ChoiceField(choices=ALGORITHMS, default='sum-product')
    schedule = serializers.ChoiceField(choices=SCHEDULES, default='flooding')
    max_iterations = serializers.IntegerField(min_value=1, default=setting('BP_MAX_ITERATIONS'))
    normalization_factor = serializers.FloatField(default=setting('NORMALIZATION_FACTOR'))
    offset_beta = serializers.FloatField(min_value=0.0, default=setting('OFFSET_BETA'))
    llr_clamp = serializers.FloatField(default=setting('LLR_CLAMP'))

    def validate_normalization_factor(self, value):
        if not 0 < value <= 1:
            raise serializers.ValidationError("normalization_factor must lie in (0, 1]")
        return value

    def validate_llr_clamp(self, value):
        if not value > 0:
            raise serializers.ValidationError("llr_clamp must be positive")
        return value

    def create(self, validated_data):
        return BpConfig(**validated_data)
